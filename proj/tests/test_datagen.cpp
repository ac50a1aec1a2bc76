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
#include <fstream>
#include <limits>
#include <numeric>

#include <doctest.h>

#include "scma/datagen.hpp"
#include "scma/error.hpp"
#include "test_util.hpp"

using namespace scma;

namespace {

MeasurementMatrix default_phi() {
  return measurement_matrix(build_codebook(build_factor_graph(4, 6, 2)), assign_pilots(6, 1));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_CASE("stacking puts real parts before imaginary parts") {
  CVector y(2);
  y << Complex(1, 2), Complex(3, -1);
  const Eigen::VectorXd x = stack_real_imag(y);
  REQUIRE(x.size() == 4);
  CHECK(x(0) == 1);
  CHECK(x(1) == 3);
  CHECK(x(2) == 2);
  CHECK(x(3) == -1);

  CHECK(stack_real_imag(CVector::Zero(4)).isZero(0.0));
  CVector real(3);
  real << Complex(1.5, 0), Complex(-2, 0), Complex(0.25, 0);
  const Eigen::VectorXd xr = stack_real_imag(real);
  CHECK(xr.tail(3).isZero(0.0));
  CHECK(xr.head(3) == real.real());
}

TEST_CASE("dataset dimensions and labels") {
  const auto phi = default_phi();
  const auto data = generate_dataset(phi, 2, SnrSpec::fixed(10.0), 1000, 7);
  CHECK(data.size() == 1000);
  CHECK(data.meta.input_dim() == 8);
  CHECK(data.inputs.size() == 8000);
  CHECK(data.labels.size() == 6000);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto l = data.label(i);
    CHECK(std::accumulate(l.begin(), l.end(), 0) == 2);
    CHECK(data.input(i).size() == 8);
  }
}

TEST_CASE("generation is deterministic and independent of the worker count") {
  const auto phi = default_phi();
  const auto a = generate_dataset(phi, 1, SnrSpec::range(0, 30), 9000, 3, 1);
  const auto b = generate_dataset(phi, 1, SnrSpec::range(0, 30), 9000, 3, 1);
  const auto c = generate_dataset(phi, 1, SnrSpec::range(0, 30), 9000, 3, 3);
  CHECK(a == b);
  CHECK(a == c);
  const auto d = generate_dataset(phi, 1, SnrSpec::range(0, 30), 9000, 4, 1);
  CHECK(a.inputs != d.inputs);
}

TEST_CASE("noiseless labels name the columns that explain the input") {
  const auto phi = default_phi();
  const auto data = generate_dataset(phi, 2, SnrSpec::fixed(std::numeric_limits<double>::infinity()),
                                     300, 5);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto in = data.input(i);
    CVector y(4);
    for (int l = 0; l < 4; ++l) y(l) = Complex(in[l], in[4 + l]);
    std::vector<int> cols;
    for (int n = 0; n < 6; ++n) {
      if (data.label(i)[n]) cols.push_back(n);
    }
    CMatrix sub(4, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = phi.phi.col(cols[k]);
    const CVector coef = sub.colPivHouseholderQr().solve(y);
    // float32 storage bounds the residual
    CHECK((y - sub * coef).norm() < 1e-5 * (1.0 + y.norm()));
  }
}

TEST_CASE("range SNR draws differ per sample, fixed SNR does not") {
  const auto phi = default_phi();
  const auto fixed = generate_dataset(phi, 1, SnrSpec::fixed(0.0), 4000, 1);
  const auto range = generate_dataset(phi, 1, SnrSpec::range(0.0, 30.0), 4000, 1);
  auto residual_energy = [&](const Dataset& d) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto in = d.input(i);
      CVector y(4);
      for (int l = 0; l < 4; ++l) y(l) = Complex(in[l], in[4 + l]);
      int n = 0;
      while (!d.label(i)[n]) ++n;
      const CVector c = phi.phi.col(n);
      e += (y - c * (c.adjoint() * y)(0)).squaredNorm();
    }
    return e / static_cast<double>(d.size());
  };
  // at 0 dB the off-column noise energy is 3 * 0.25; a 0..30 dB draw is much smaller
  CHECK(residual_energy(fixed) == doctest::Approx(0.75).epsilon(0.05));
  CHECK(residual_energy(range) < 0.2);
}

TEST_CASE("split is 80/10/10 by contiguous blocks") {
  const auto data = generate_dataset(default_phi(), 1, SnrSpec::fixed(5), 1000, 2);
  const auto s = split_dataset(data);
  CHECK(s.train.size() == 800);
  CHECK(s.validation.size() == 100);
  CHECK(s.test.size() == 100);
  CHECK(s.validation.input(0)[0] == data.input(800)[0]);
  CHECK(s.test.label(99)[5] == data.label(999)[5]);
}

TEST_CASE("generation rejects invalid arguments") {
  const auto phi = default_phi();
  CHECK_THROWS_AS(generate_dataset(phi, 0, SnrSpec::fixed(0), 10, 1), Error);
  CHECK_THROWS_AS(generate_dataset(phi, 7, SnrSpec::fixed(0), 10, 1), Error);
  CHECK_THROWS_AS(generate_dataset(phi, 1, SnrSpec::fixed(0), 0, 1), Error);
  CHECK_THROWS_AS(generate_dataset(phi, 1, SnrSpec::range(10, 0), 10, 1), Error);
}

TEST_CASE("dataset files") {
  testing::TempDir dir("dataset");
  const auto data = generate_dataset(default_phi(), 2, SnrSpec::range(0, 30), 500, 9);
  const std::string path = dir.file("d.bin");
  save_dataset(data, path);
  CHECK(load_dataset(path) == data);

  const auto fixed = generate_dataset(default_phi(), 1, SnrSpec::fixed(12.5), 10, 9);
  save_dataset(fixed, dir.file("f.bin"));
  const auto back = load_dataset(dir.file("f.bin"));
  CHECK(back == fixed);
  CHECK(back.meta.snr.is_fixed());

  const std::string bytes = slurp(path);
  CHECK(bytes.rfind("SCMA-AUD-DS1\n", 0) == 0);

  SUBCASE("corrupted magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    spit(dir.file("bad.bin"), bad);
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  SUBCASE("count larger than payload") {
    std::string bad = bytes;
    const auto pos = bad.find("\"count\":500");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 11, "\"count\":501");
    spit(dir.file("bad.bin"), bad);
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  SUBCASE("count smaller than payload") {
    std::string bad = bytes;
    const auto pos = bad.find("\"count\":500");
    bad.replace(pos, 11, "\"count\":499");
    spit(dir.file("bad.bin"), bad);
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  SUBCASE("truncated payload") {
    spit(dir.file("bad.bin"), bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  SUBCASE("label outside {0, 1}") {
    std::string bad = bytes;
    bad.back() = 2;
    spit(dir.file("bad.bin"), bad);
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  SUBCASE("malformed header") {
    spit(dir.file("bad.bin"), "SCMA-AUD-DS1\n{not json\n");
    CHECK_THROWS_AS(load_dataset(dir.file("bad.bin")), Error);
  }
  CHECK_THROWS_AS(load_dataset(dir.file("missing.bin")), Error);
}
