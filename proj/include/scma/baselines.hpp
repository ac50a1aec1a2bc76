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

#include <cstdint>
#include <string>
#include <vector>

#include "scma/signal.hpp"

namespace scma {

struct BompConfig {
  int sparsity = 1;  // number of blocks to select
  // Column-index blocks partitioning [0, N). Empty means singleton blocks.
  std::vector<std::vector<int>> blocks;
};

struct BompResult {
  std::vector<std::uint8_t> support;  // length N
  CVector coefficients;               // LS estimate, zero off-support
  std::vector<int> picked_blocks;
  std::vector<double> residual_norms;  // after each iteration
  bool rank_deficient = false;
};

// Least-squares block orthogonal matching pursuit: picks the block with
// the largest normalized residual correlation, re-solves LS on the whole
// accumulated support and updates the residual, for exactly `sparsity`
// iterations. Lowest block index wins ties.
BompResult ls_bomp(const MeasurementMatrix& phi, const CVector& received,
                   const BompConfig& config);

struct AmpConfig {
  int max_iters = 100;
  double damping = 1.0;  // 1 = undamped
  double theta = 1.25;   // threshold multiplier on the residual level
  double tolerance = 1e-6;
};

struct AmpResult {
  std::vector<std::uint8_t> support;
  CVector estimate;
  std::vector<double> thresholds;      // tau per iteration
  std::vector<double> residual_norms;  // ||z|| per iteration
  int iterations = 0;
  bool diverged = false;
};

inline constexpr const char* kAmpLabel = "C-AMP-ST";

// Complex AMP with a magnitude soft-threshold denoiser (phase preserved),
// tau_t = theta * ||z_t|| / sqrt(L), and the Onsager term of that
// denoiser. Five consecutive residual increases above ||y|| abort with an
// empty support and `diverged` set.
AmpResult c_amp(const MeasurementMatrix& phi, const CVector& received, const AmpConfig& config);

struct OracleResult {
  std::vector<std::uint8_t> support;
  double residual_norm = 0.0;
};

inline constexpr int kOracleMaxDevices = 20;

// Brute force over all C(N, m) supports; lowest lexicographic support wins
// ties.
OracleResult exhaustive_oracle(const MeasurementMatrix& phi, const CVector& received, int m);

// Least-squares residual norm of `received` on the given columns.
double ls_residual_norm(const CMatrix& phi, const CVector& received,
                        const std::vector<int>& columns);

}  // namespace scma
