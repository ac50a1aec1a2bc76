// Copyright 2026 The SCMA-AUD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scma/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "scma/binary_io.hpp"
#include "scma/error.hpp"

namespace scma {

namespace {

constexpr const char* kMagic = "SCMA-AUD-DS1";

nlohmann::json meta_to_json(const DatasetMeta& m) {
  nlohmann::json j = {{"L", m.resources}, {"N", m.devices}, {"m", m.active},
                      {"seed", m.seed}, {"count", m.count}};
  if (m.snr.is_fixed()) {
    j["snr_db"] = m.snr.lo;
  } else {
    j["snr_range"] = {m.snr.lo, m.snr.hi};
  }
  return j;
}

DatasetMeta meta_from_json(const nlohmann::json& j) {
  DatasetMeta m;
  try {
    m.resources = j.at("L").get<int>();
    m.devices = j.at("N").get<int>();
    m.active = j.at("m").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.count = j.at("count").get<std::size_t>();
    if (j.contains("snr_db")) {
      m.snr = SnrSpec::fixed(j.at("snr_db").get<double>());
    } else {
      const auto r = j.at("snr_range").get<std::vector<double>>();
      require(r.size() == 2, ErrorKind::Format, "dataset header: snr_range needs 2 values");
      m.snr = SnrSpec::range(r[0], r[1]);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("dataset header: ") + e.what());
  }
  require(m.resources > 0 && m.devices > 0, ErrorKind::Format,
          "dataset header: dimensions must be positive");
  return m;
}

void generate_shard(const MeasurementMatrix& phi, int active, SnrSpec snr,
                    std::uint64_t seed, std::size_t shard, std::size_t begin,
                    std::size_t end, Dataset& out) {
  Rng rng(derive_seed(seed, {tag_of("datagen"), shard}));
  std::uniform_real_distribution<double> snr_draw(snr.lo, snr.hi);
  const int L = phi.resources();
  const int N = phi.devices();
  for (std::size_t i = begin; i < end; ++i) {
    const double snr_db = snr.is_fixed() ? snr.lo : snr_draw(rng);
    const Frame f = sample_frame(phi, active, snr_db, rng);
    const Eigen::VectorXd x = stack_real_imag(f.received);
    for (int k = 0; k < 2 * L; ++k) out.inputs[i * 2 * L + k] = static_cast<float>(x(k));
    for (int n = 0; n < N; ++n) out.labels[i * N + n] = f.activity[n];
  }
}

}  // namespace

std::span<const float> Dataset::input(std::size_t i) const {
  const auto d = static_cast<std::size_t>(meta.input_dim());
  return std::span<const float>(inputs).subspan(i * d, d);
}

std::span<const std::uint8_t> Dataset::label(std::size_t i) const {
  const auto n = static_cast<std::size_t>(meta.devices);
  return std::span<const std::uint8_t>(labels).subspan(i * n, n);
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= size(), ErrorKind::InvalidArgument, "dataset slice out of range");
  const auto d = static_cast<std::size_t>(meta.input_dim());
  const auto n = static_cast<std::size_t>(meta.devices);
  Dataset out;
  out.meta = meta;
  out.meta.count = end - begin;
  out.inputs.assign(inputs.begin() + begin * d, inputs.begin() + end * d);
  out.labels.assign(labels.begin() + begin * n, labels.begin() + end * n);
  return out;
}

bool Dataset::operator==(const Dataset& o) const {
  return meta.resources == o.meta.resources && meta.devices == o.meta.devices &&
         meta.active == o.meta.active && meta.snr.lo == o.meta.snr.lo &&
         meta.snr.hi == o.meta.snr.hi && meta.seed == o.meta.seed &&
         meta.count == o.meta.count && inputs == o.inputs && labels == o.labels;
}

Eigen::VectorXd stack_real_imag(const CVector& received) {
  const auto L = received.size();
  Eigen::VectorXd out(2 * L);
  out.head(L) = received.real();
  out.tail(L) = received.imag();
  return out;
}

Dataset generate_dataset(const MeasurementMatrix& phi, int active_devices,
                         SnrSpec snr, std::size_t count, std::uint64_t seed,
                         int threads) {
  require(count >= 1, ErrorKind::InvalidArgument, "dataset count must be at least 1");
  require(active_devices >= 1 && active_devices <= phi.devices(),
          ErrorKind::InvalidArgument, "active device count out of range");
  require(snr.lo <= snr.hi, ErrorKind::InvalidArgument, "SNR range must satisfy lo <= hi");

  Dataset data;
  data.meta = DatasetMeta{phi.resources(), phi.devices(), active_devices, snr, seed, count};
  data.inputs.resize(count * static_cast<std::size_t>(data.meta.input_dim()));
  data.labels.resize(count * static_cast<std::size_t>(phi.devices()));

  const std::size_t shards = (count + kDatasetShardSize - 1) / kDatasetShardSize;
  auto run = [&](std::size_t shard) {
    const std::size_t begin = shard * kDatasetShardSize;
    const std::size_t end = std::min(count, begin + kDatasetShardSize);
    generate_shard(phi, active_devices, snr, seed, shard, begin, end, data);
  };

  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || shards == 1) {
    for (std::size_t s = 0; s < shards; ++s) run(s);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, shards); ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += workers) run(s);
      });
    }
  }
  return data;
}

DatasetSplit split_dataset(const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t train_end = n * 8 / 10;
  const std::size_t val_end = train_end + n / 10;
  return {data.slice(0, train_end), data.slice(train_end, val_end), data.slice(val_end, n)};
}

void save_dataset(const Dataset& data, const std::string& path) {
  require(data.inputs.size() == data.size() * data.meta.input_dim() &&
              data.labels.size() == data.size() * data.meta.devices,
          ErrorKind::DimensionMismatch, "dataset payload does not match its meta");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write dataset " + path);
  io::write_header(out, kMagic, meta_to_json(data.meta));
  io::write_f32(out, data.inputs);
  out.write(reinterpret_cast<const char*>(data.labels.data()),
            static_cast<std::streamsize>(data.labels.size()));
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing dataset " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open dataset " + path);
  const std::string what = "dataset " + path;
  Dataset data;
  data.meta = meta_from_json(io::read_header(in, kMagic, what));
  const std::uint64_t expected =
      data.meta.count * (4ULL * static_cast<std::uint64_t>(data.meta.input_dim()) +
                         static_cast<std::uint64_t>(data.meta.devices));
  const std::uint64_t available = io::remaining_bytes(in);
  require(available >= expected, ErrorKind::Format,
          what + ": truncated payload (header promises " + std::to_string(data.meta.count) +
              " samples)");
  data.inputs.resize(data.meta.count * static_cast<std::size_t>(data.meta.input_dim()));
  data.labels.resize(data.meta.count * static_cast<std::size_t>(data.meta.devices));
  io::read_f32(in, data.inputs, what);
  in.read(reinterpret_cast<char*>(data.labels.data()),
          static_cast<std::streamsize>(data.labels.size()));
  require(static_cast<std::size_t>(in.gcount()) == data.labels.size(), ErrorKind::Format,
          what + ": truncated label payload");
  io::expect_eof(in, what);
  for (std::uint8_t v : data.labels) {
    require(v <= 1, ErrorKind::Format, what + ": label outside {0, 1}");
  }
  return data;
}

}  // namespace scma
