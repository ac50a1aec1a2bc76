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


#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "scma/error.hpp"
#include "scma/signal.hpp"
#include "test_util.hpp"

using namespace scma;

namespace {

MeasurementMatrix default_phi() {
  const auto cb = build_codebook(build_factor_graph(4, 6, 2));
  return measurement_matrix(cb, assign_pilots(6, 1));
}

}  // namespace

TEST_CASE("factor graph enumerates J-subsets lexicographically") {
  const auto g = build_factor_graph(4, 6, 2);
  const std::vector<std::vector<int>> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  CHECK(g.columns == want);
  CHECK_NOTHROW(g.validate());

  const auto small = build_factor_graph(2, 2, 1);
  CHECK(small.columns == std::vector<std::vector<int>>{{0}, {1}});

  // prefix of the enumeration when N < C(L, J)
  const auto prefix = build_factor_graph(4, 3, 2);
  CHECK(prefix.columns == std::vector<std::vector<int>>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("factor graph rejects more devices than patterns") {
  CHECK_THROWS_AS(build_factor_graph(4, 7, 2), Error);
  CHECK_THROWS_AS(build_factor_graph(2, 1, 3), Error);
  CHECK_THROWS_AS(build_factor_graph(0, 1, 1), Error);
}

TEST_CASE("factor graph validation catches duplicate and out-of-range columns") {
  auto g = build_factor_graph(4, 6, 2);
  g.columns[5] = {0, 1};
  CHECK_THROWS_AS(g.validate(), Error);
  g.columns[5] = {2, 4};
  CHECK_THROWS_AS(g.validate(), Error);
  g.columns[5] = {3, 2};
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("binomial") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(20, 10) == 184756);
  CHECK(binomial(3, 4) == 0);
}

TEST_CASE("default codebook") {
  const auto g = build_factor_graph(4, 6, 2);
  const auto cb = build_codebook(g);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(cb.matrix(0, 0) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(cb.matrix(1, 0) - Complex(r, 0)) < 1e-15);

  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(cb.matrix.col(n).norm() - 1.0) < 1e-12);
    int nonzeros = 0;
    for (int l = 0; l < 4; ++l) {
      const bool nz = cb.matrix(l, n) != Complex(0, 0);
      CHECK(nz == g.connects(l, n));
      nonzeros += nz;
    }
    CHECK(nonzeros == 2);
    // second nonzero carries phase 2*pi*n/(N*J)
    const double phase = std::arg(cb.matrix(g.columns[n][1], n));
    CHECK(std::abs(std::remainder(phase - 2 * std::numbers::pi * n / 12.0, 2 * std::numbers::pi)) <
          1e-12);
  }
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) CHECK((cb.matrix.col(a) - cb.matrix.col(b)).norm() > 1e-3);
  }
}

TEST_CASE("supplied codebook table") {
  const auto g = build_factor_graph(4, 6, 2);
  CMatrix table = CMatrix::Zero(4, 6);
  for (int n = 0; n < 6; ++n) {
    table(g.columns[n][0], n) = Complex(3.0, 0.0);
    table(g.columns[n][1], n) = Complex(0.0, 4.0);
  }
  const auto cb = build_codebook(g, table);
  CHECK(std::abs(cb.matrix(0, 0) - Complex(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(cb.matrix(1, 0) - Complex(0.0, 0.8)) < 1e-15);

  SUBCASE("value at a zero-pattern position") {
    CMatrix bad = table;
    bad(3, 0) = Complex(0.1, 0.0);
    CHECK_THROWS_AS(build_codebook(g, bad), Error);
  }
  SUBCASE("missing value on the pattern") {
    CMatrix bad = table;
    bad(0, 0) = Complex(0.0, 0.0);
    CHECK_THROWS_AS(build_codebook(g, bad), Error);
  }
  SUBCASE("wrong shape") {
    CHECK_THROWS_AS(build_codebook(g, CMatrix::Ones(4, 5)), Error);
  }
}

TEST_CASE("codebook file round trip and validation") {
  testing::TempDir dir("codebook");
  const auto cb = build_codebook(build_factor_graph(4, 6, 2));
  save_codebook(cb, dir.file("cb.json"));
  const auto back = load_codebook(dir.file("cb.json"));
  CHECK(back.graph.columns == cb.graph.columns);
  CHECK((back.matrix - cb.matrix).norm() < 1e-15);

  auto doc = codebook_to_json(cb);
  SUBCASE("pattern disagrees with values") {
    doc["pattern"][0] = {0, 2};
    doc["pattern"][1] = {0, 1};
    CHECK_THROWS_AS(codebook_from_json(doc), Error);
  }
  SUBCASE("missing field") {
    doc.erase("values");
    CHECK_THROWS_AS(codebook_from_json(doc), Error);
  }
  SUBCASE("bad entry arity") {
    doc["values"][0][0] = {1.0};
    CHECK_THROWS_AS(codebook_from_json(doc), Error);
  }
  CHECK_THROWS_AS(load_codebook(dir.file("missing.json")), Error);
}

TEST_CASE("pilots are deterministic QPSK symbols") {
  const auto a = assign_pilots(6, 42);
  const auto b = assign_pilots(6, 42);
  CHECK(a.symbols == b.symbols);
  for (int n = 0; n < 6; ++n) {
    const Complex s = a.symbols(n);
    CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
    // angle is an odd multiple of pi/4
    const double k = std::arg(s) / (std::numbers::pi / 4.0);
    CHECK(std::abs(k - std::round(k)) < 1e-12);
    CHECK(static_cast<long>(std::lround(k)) % 2 != 0);
  }
  const auto one = assign_pilots(1, 7);
  CHECK(one.symbols.size() == 1);
  CHECK(std::abs(std::abs(one.symbols(0)) - 1.0) < 1e-12);
  CHECK(assign_pilots(64, 1).symbols != assign_pilots(64, 2).symbols);
}

TEST_CASE("measurement matrix scales codebook columns by pilots") {
  const auto cb = build_codebook(build_factor_graph(4, 6, 2));
  PilotAssignment ones{CVector::Ones(6)};
  CHECK(measurement_matrix(cb, ones).phi == cb.matrix);

  const auto pilots = assign_pilots(6, 3);
  const auto phi = measurement_matrix(cb, pilots);
  for (int n = 0; n < 6; ++n) {
    for (int l = 0; l < 4; ++l) {
      CHECK(std::abs(std::abs(phi.phi(l, n)) - std::abs(cb.matrix(l, n))) < 1e-12);
      CHECK((phi.phi(l, n) != Complex(0, 0)) == cb.graph.connects(l, n));
      CHECK(std::abs(phi.phi(l, n) - cb.matrix(l, n) * pilots.symbols(n)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(measurement_matrix(cb, assign_pilots(5, 3)), Error);
}

TEST_CASE("noise variance follows the per-element SNR convention") {
  const auto phi = default_phi();
  CHECK(snr_to_noise_variance(0.0, phi, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(snr_to_noise_variance(10.0, phi, 1) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(snr_to_noise_variance(0.0, phi, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(snr_to_noise_variance(200.0, phi, 1) < 1e-20);
  CHECK(snr_to_noise_variance(std::numeric_limits<double>::infinity(), phi, 1) == 0.0);
}

TEST_CASE("noiseless single-device frame") {
  const auto phi = default_phi();
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto f = sample_frame_at_noise_variance(phi, 1, 0.0, rng);
    CHECK(f.active_count() == 1);
    int n = 0;
    while (!f.activity[n]) ++n;
    // the full product adds exact zeros but may fuse multiply-adds differently
    CHECK((f.received - phi.phi.col(n) * f.channel(n)).norm() <= 1e-15);
  }
}

TEST_CASE("frame invariants") {
  const auto phi = default_phi();
  Rng rng(11);
  for (int m = 1; m <= 6; ++m) {
    for (int i = 0; i < 200; ++i) {
      const auto f = sample_frame(phi, m, 10.0, rng);
      CHECK(f.active_count() == m);
      int nonzero = 0;
      for (int n = 0; n < 6; ++n) {
        if (!f.activity[n]) CHECK(f.g(n) == Complex(0, 0));
        nonzero += f.g(n) != Complex(0, 0);
      }
      CHECK(nonzero == m);
      CHECK((f.received - phi.phi * f.g - f.noise).norm() < 1e-14);
      CHECK(f.noise_variance == doctest::Approx(snr_to_noise_variance(10.0, phi, m)));
    }
  }
  CHECK_THROWS_AS(sample_frame(phi, 0, 10.0, rng), Error);
  CHECK_THROWS_AS(sample_frame(phi, 7, 10.0, rng), Error);
}

TEST_CASE("noise second moment") {
  const auto phi = default_phi();
  Rng rng(99);
  double sum = 0.0;
  int count = 0;
  while (count < 100000) {
    const auto f = sample_frame_at_noise_variance(phi, 1, 1.0, rng);
    for (int l = 0; l < 4 && count < 100000; ++l, ++count) sum += std::norm(f.noise(l));
  }
  CHECK(std::abs(sum / count - 1.0) < 0.02);
}

TEST_CASE("channel is circularly symmetric with unit variance") {
  Rng rng(3);
  double re2 = 0, im2 = 0, cross = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Complex h = sample_cn(1.0, rng);
    re2 += h.real() * h.real();
    im2 += h.imag() * h.imag();
    cross += h.real() * h.imag();
  }
  CHECK(std::abs(re2 / draws - 0.5) < 0.01);
  CHECK(std::abs(im2 / draws - 0.5) < 0.01);
  CHECK(std::abs(cross / draws) < 0.01);
  CHECK(sample_cn(0.0, rng) == Complex(0, 0));
}

TEST_CASE("supports are uniform over all m-subsets") {
  Rng rng(2024);
  std::map<std::vector<int>, int> counts;
  const int draws = 150000;
  for (int i = 0; i < draws; ++i) ++counts[sample_support(6, 2, rng)];
  CHECK(counts.size() == 15);
  for (const auto& [support, c] : counts) {
    CHECK(support.size() == 2);
    CHECK(support[0] < support[1]);
    CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 15.0) < 0.01);
  }
}

TEST_CASE("frames are reproducible from the seed") {
  const auto phi = default_phi();
  Rng a(17), b(17);
  for (int i = 0; i < 20; ++i) {
    const auto fa = sample_frame(phi, 2, 5.0, a);
    const auto fb = sample_frame(phi, 2, 5.0, b);
    CHECK(fa.activity == fb.activity);
    CHECK(fa.received == fb.received);
  }
}
