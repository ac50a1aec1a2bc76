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

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "scma/rng.hpp"

namespace scma {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Device-to-resource connectivity. Column n lists the J resource elements
// on which codeword n is nonzero, in increasing order.
struct FactorGraph {
  int num_resources = 0;            // L
  int num_devices = 0;              // N
  int nonzeros_per_codeword = 0;    // J
  std::vector<std::vector<int>> columns;

  bool connects(int resource, int device) const;
  void validate() const;
};

struct Codebook {
  CMatrix matrix;  // L x N, unit-norm columns
  FactorGraph graph;
};

struct PilotAssignment {
  CVector symbols;  // one QPSK symbol per device
};

// Phi = C * diag(x_p). Known at the receiver.
struct MeasurementMatrix {
  CMatrix phi;

  int resources() const { return static_cast<int>(phi.rows()); }
  int devices() const { return static_cast<int>(phi.cols()); }
};

// One pilot-phase transmission.
struct Frame {
  std::vector<std::uint8_t> activity;
  CVector channel;
  CVector g;  // activity o channel
  double noise_variance = 0.0;
  CVector received;  // y_p = Phi g + w
  CVector noise;     // w

  int active_count() const;
};

std::uint64_t binomial(int n, int k);

// First N J-subsets of [0, L) in lexicographic order.
FactorGraph build_factor_graph(int num_resources, int num_devices,
                               int nonzeros_per_codeword);

// Without a table, column n gets e^{i 2 pi n k / (N J)} on its k-th nonzero.
// A supplied L x N table must be nonzero exactly on the graph pattern. Every
// column is normalized to unit Euclidean norm.
Codebook build_codebook(const FactorGraph& graph,
                        const std::optional<CMatrix>& table = std::nullopt);

// JSON codebook: {L, N, J, pattern: [[rows...] per column],
//                 values: [[[re, im] x L] per column]}.
Codebook codebook_from_json(const nlohmann::json& doc);
nlohmann::json codebook_to_json(const Codebook& codebook);
Codebook load_codebook(const std::string& path);
void save_codebook(const Codebook& codebook, const std::string& path);

PilotAssignment assign_pilots(int num_devices, std::uint64_t seed);

MeasurementMatrix measurement_matrix(const Codebook& codebook,
                                     const PilotAssignment& pilots);

// Per-resource-element SNR: average received signal power per RE over the
// per-RE noise power, with unit-variance channels and m active devices.
double snr_to_noise_variance(double snr_db, const MeasurementMatrix& phi,
                             int active_devices);

// Uniform support of size m, h ~ CN(0, I), w ~ CN(0, noise_variance I).
Frame sample_frame(const MeasurementMatrix& phi, int active_devices,
                   double snr_db, Rng& rng);
Frame sample_frame_at_noise_variance(const MeasurementMatrix& phi,
                                     int active_devices, double noise_variance,
                                     Rng& rng);

// Draws m distinct device indices, returned in increasing order.
std::vector<int> sample_support(int num_devices, int active_devices, Rng& rng);

Complex sample_cn(double variance, Rng& rng);

}  // namespace scma
