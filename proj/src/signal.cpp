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

#include "scma/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "scma/error.hpp"

namespace scma {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

bool FactorGraph::connects(int resource, int device) const {
  const auto& col = columns.at(static_cast<std::size_t>(device));
  return std::binary_search(col.begin(), col.end(), resource);
}

void FactorGraph::validate() const {
  require(num_resources > 0 && num_devices > 0 && nonzeros_per_codeword > 0,
          ErrorKind::InvalidArgument, "factor graph dimensions must be positive");
  require(nonzeros_per_codeword <= num_resources, ErrorKind::InvalidArgument,
          "J must not exceed L");
  require(static_cast<int>(columns.size()) == num_devices,
          ErrorKind::InvalidArgument, "factor graph must have N columns");
  std::set<std::vector<int>> seen;
  for (const auto& col : columns) {
    require(static_cast<int>(col.size()) == nonzeros_per_codeword,
            ErrorKind::InvalidArgument, "factor graph column must have J entries");
    for (std::size_t k = 0; k < col.size(); ++k) {
      require(col[k] >= 0 && col[k] < num_resources, ErrorKind::InvalidArgument,
              "factor graph resource index out of range");
      require(k == 0 || col[k - 1] < col[k], ErrorKind::InvalidArgument,
              "factor graph column entries must be distinct and increasing");
    }
    require(seen.insert(col).second, ErrorKind::InvalidArgument,
            "factor graph columns must be pairwise distinct");
  }
}

int Frame::active_count() const {
  return static_cast<int>(std::count(activity.begin(), activity.end(), 1));
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

FactorGraph build_factor_graph(int num_resources, int num_devices,
                               int nonzeros_per_codeword) {
  require(num_resources > 0 && num_devices > 0 && nonzeros_per_codeword > 0,
          ErrorKind::InvalidArgument, "L, N and J must be positive");
  require(nonzeros_per_codeword <= num_resources, ErrorKind::InvalidArgument,
          "J must not exceed L");
  require(static_cast<std::uint64_t>(num_devices) <=
              binomial(num_resources, nonzeros_per_codeword),
          ErrorKind::InvalidArgument,
          "N exceeds C(L, J): not enough distinct sparse patterns");

  FactorGraph graph;
  graph.num_resources = num_resources;
  graph.num_devices = num_devices;
  graph.nonzeros_per_codeword = nonzeros_per_codeword;

  std::vector<int> subset(static_cast<std::size_t>(nonzeros_per_codeword));
  for (int k = 0; k < nonzeros_per_codeword; ++k) subset[k] = k;
  while (static_cast<int>(graph.columns.size()) < num_devices) {
    graph.columns.push_back(subset);
    // advance to the next combination in lexicographic order
    int i = nonzeros_per_codeword - 1;
    while (i >= 0 && subset[i] == num_resources - nonzeros_per_codeword + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int k = i + 1; k < nonzeros_per_codeword; ++k) subset[k] = subset[k - 1] + 1;
  }
  return graph;
}

Codebook build_codebook(const FactorGraph& graph,
                        const std::optional<CMatrix>& table) {
  graph.validate();
  const int L = graph.num_resources;
  const int N = graph.num_devices;
  const int J = graph.nonzeros_per_codeword;

  CMatrix c = CMatrix::Zero(L, N);
  if (table) {
    require(table->rows() == L && table->cols() == N, ErrorKind::DimensionMismatch,
            "codebook table is " + dims(table->rows(), table->cols()) +
                ", expected " + dims(L, N));
    for (int n = 0; n < N; ++n) {
      for (int l = 0; l < L; ++l) {
        const bool nonzero = (*table)(l, n) != Complex(0.0, 0.0);
        require(nonzero == graph.connects(l, n), ErrorKind::InvalidArgument,
                "codebook table does not match the factor graph at (" +
                    std::to_string(l) + ", " + std::to_string(n) + ")");
      }
    }
    c = *table;
  } else {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < J; ++k) {
        const double angle = 2.0 * std::numbers::pi * n * k / (static_cast<double>(N) * J);
        c(graph.columns[n][k], n) = std::polar(1.0, angle);
      }
    }
  }

  for (int n = 0; n < N; ++n) {
    const double norm = c.col(n).norm();
    require(norm > 0.0 && std::isfinite(norm), ErrorKind::InvalidArgument,
            "codebook column " + std::to_string(n) + " has zero or non-finite norm");
    c.col(n) /= norm;
  }
  return Codebook{std::move(c), graph};
}

Codebook codebook_from_json(const nlohmann::json& doc) {
  try {
    FactorGraph graph;
    graph.num_resources = doc.at("L").get<int>();
    graph.num_devices = doc.at("N").get<int>();
    graph.nonzeros_per_codeword = doc.at("J").get<int>();
    graph.columns = doc.at("pattern").get<std::vector<std::vector<int>>>();
    graph.validate();

    const auto& values = doc.at("values");
    require(values.is_array() && static_cast<int>(values.size()) == graph.num_devices,
            ErrorKind::Format, "codebook values must list N columns");
    CMatrix table(graph.num_resources, graph.num_devices);
    for (int n = 0; n < graph.num_devices; ++n) {
      const auto& col = values[n];
      require(col.is_array() && static_cast<int>(col.size()) == graph.num_resources,
              ErrorKind::Format, "codebook column must list L [re, im] pairs");
      for (int l = 0; l < graph.num_resources; ++l) {
        const auto pair = col[l].get<std::vector<double>>();
        require(pair.size() == 2, ErrorKind::Format, "codebook entry must be [re, im]");
        table(l, n) = Complex(pair[0], pair[1]);
      }
    }
    return build_codebook(graph, table);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed codebook JSON: ") + e.what());
  }
}

nlohmann::json codebook_to_json(const Codebook& codebook) {
  const auto& g = codebook.graph;
  nlohmann::json values = nlohmann::json::array();
  for (int n = 0; n < g.num_devices; ++n) {
    nlohmann::json col = nlohmann::json::array();
    for (int l = 0; l < g.num_resources; ++l) {
      const Complex v = codebook.matrix(l, n);
      col.push_back({v.real(), v.imag()});
    }
    values.push_back(std::move(col));
  }
  return {{"L", g.num_resources},
          {"N", g.num_devices},
          {"J", g.nonzeros_per_codeword},
          {"pattern", g.columns},
          {"values", std::move(values)}};
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open codebook file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, "codebook " + path + ": " + e.what());
  }
  return codebook_from_json(doc);
}

void save_codebook(const Codebook& codebook, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write codebook file " + path);
  out << codebook_to_json(codebook).dump(2) << '\n';
}

PilotAssignment assign_pilots(int num_devices, std::uint64_t seed) {
  require(num_devices > 0, ErrorKind::InvalidArgument, "N must be positive");
  Rng rng(derive_seed(seed, {tag_of("pilots"), static_cast<std::uint64_t>(num_devices)}));
  std::uniform_int_distribution<int> quadrant(0, 3);
  PilotAssignment pilots{CVector(num_devices)};
  for (int n = 0; n < num_devices; ++n) {
    pilots.symbols(n) = std::polar(1.0, std::numbers::pi * (2 * quadrant(rng) + 1) / 4.0);
  }
  return pilots;
}

MeasurementMatrix measurement_matrix(const Codebook& codebook,
                                     const PilotAssignment& pilots) {
  require(codebook.matrix.cols() == pilots.symbols.size(), ErrorKind::DimensionMismatch,
          "pilot count does not match codebook columns");
  return MeasurementMatrix{codebook.matrix * pilots.symbols.asDiagonal()};
}

double snr_to_noise_variance(double snr_db, const MeasurementMatrix& phi,
                             int active_devices) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const double mean_col_power = phi.phi.colwise().squaredNorm().mean();
  const double signal_power =
      static_cast<double>(active_devices) / phi.resources() * mean_col_power;
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

Complex sample_cn(double variance, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = std::sqrt(variance / 2.0);
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {scale * re, scale * im};
}

std::vector<int> sample_support(int num_devices, int active_devices, Rng& rng) {
  require(active_devices >= 1 && active_devices <= num_devices,
          ErrorKind::InvalidArgument,
          "active device count " + std::to_string(active_devices) +
              " outside [1, " + std::to_string(num_devices) + "]");
  std::vector<int> idx(static_cast<std::size_t>(num_devices));
  for (int n = 0; n < num_devices; ++n) idx[n] = n;
  // partial Fisher-Yates: the first m slots are a uniform m-subset
  for (int k = 0; k < active_devices; ++k) {
    std::uniform_int_distribution<int> pick(k, num_devices - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(static_cast<std::size_t>(active_devices));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Frame sample_frame_at_noise_variance(const MeasurementMatrix& phi,
                                     int active_devices, double noise_variance,
                                     Rng& rng) {
  require(noise_variance >= 0.0, ErrorKind::InvalidArgument,
          "noise variance must be nonnegative");
  const int N = phi.devices();
  const int L = phi.resources();
  Frame f;
  f.activity.assign(static_cast<std::size_t>(N), 0);
  for (int n : sample_support(N, active_devices, rng)) f.activity[n] = 1;
  f.channel.resize(N);
  for (int n = 0; n < N; ++n) f.channel(n) = sample_cn(1.0, rng);
  f.g = CVector::Zero(N);
  for (int n = 0; n < N; ++n) {
    if (f.activity[n]) f.g(n) = f.channel(n);
  }
  f.noise_variance = noise_variance;
  f.noise.resize(L);
  for (int l = 0; l < L; ++l) f.noise(l) = sample_cn(noise_variance, rng);
  f.received = phi.phi * f.g + f.noise;
  return f;
}

Frame sample_frame(const MeasurementMatrix& phi, int active_devices,
                   double snr_db, Rng& rng) {
  return sample_frame_at_noise_variance(
      phi, active_devices, snr_to_noise_variance(snr_db, phi, active_devices), rng);
}

}  // namespace scma
