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

#include "scma/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scma/error.hpp"

namespace scma {

namespace {

struct LsFit {
  CVector coefficients;
  CVector residual;
  bool rank_deficient = false;
};

LsFit least_squares(const CMatrix& phi, const CVector& received, const std::vector<int>& cols) {
  CMatrix sub(phi.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = phi.col(cols[k]);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(sub);
  LsFit fit;
  fit.coefficients = cod.solve(received);
  fit.residual = received - sub * fit.coefficients;
  fit.rank_deficient = cod.rank() < static_cast<Eigen::Index>(cols.size());
  return fit;
}

void check_dims(const MeasurementMatrix& phi, const CVector& received) {
  require(received.size() == phi.resources(), ErrorKind::DimensionMismatch,
          "received vector length " + std::to_string(received.size()) +
              " does not match L = " + std::to_string(phi.resources()));
}

}  // namespace

double ls_residual_norm(const CMatrix& phi, const CVector& received,
                        const std::vector<int>& columns) {
  if (columns.empty()) return received.norm();
  return least_squares(phi, received, columns).residual.norm();
}

BompResult ls_bomp(const MeasurementMatrix& phi, const CVector& received,
                   const BompConfig& config) {
  check_dims(phi, received);
  const int n_dev = phi.devices();

  std::vector<std::vector<int>> blocks = config.blocks;
  if (blocks.empty()) {
    for (int n = 0; n < n_dev; ++n) blocks.push_back({n});
  }
  std::vector<int> owner(static_cast<std::size_t>(n_dev), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    require(!blocks[b].empty(), ErrorKind::InvalidArgument, "empty block in partition");
    for (int c : blocks[b]) {
      require(c >= 0 && c < n_dev && owner[c] < 0, ErrorKind::InvalidArgument,
              "blocks must partition the device indices");
      owner[c] = static_cast<int>(b);
    }
  }
  require(std::all_of(owner.begin(), owner.end(), [](int o) { return o >= 0; }),
          ErrorKind::InvalidArgument, "blocks must cover every device index");
  require(config.sparsity >= 1 && config.sparsity <= static_cast<int>(blocks.size()),
          ErrorKind::InvalidArgument, "LS-BOMP sparsity out of range");

  std::vector<double> block_norm(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    double sq = 0.0;
    for (int c : blocks[b]) sq += phi.phi.col(c).squaredNorm();
    require(sq > 0.0, ErrorKind::InvalidArgument, "measurement matrix has a zero column");
    block_norm[b] = std::sqrt(sq);
  }

  BompResult result;
  result.support.assign(static_cast<std::size_t>(n_dev), 0);
  result.coefficients = CVector::Zero(n_dev);
  std::vector<bool> taken(blocks.size(), false);
  std::vector<int> columns;
  CVector residual = received;
  LsFit fit;

  for (int it = 0; it < config.sparsity; ++it) {
    int best = -1;
    double best_score = -1.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (taken[b]) continue;
      double corr = 0.0;
      for (int c : blocks[b]) corr += std::norm(phi.phi.col(c).dot(residual));
      const double score = std::sqrt(corr) / block_norm[b];
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(b);
      }
    }
    taken[best] = true;
    result.picked_blocks.push_back(best);
    columns.insert(columns.end(), blocks[best].begin(), blocks[best].end());
    fit = least_squares(phi.phi, received, columns);
    result.rank_deficient = result.rank_deficient || fit.rank_deficient;
    residual = fit.residual;
    result.residual_norms.push_back(residual.norm());
  }

  for (std::size_t k = 0; k < columns.size(); ++k) {
    result.support[columns[k]] = 1;
    result.coefficients(columns[k]) = fit.coefficients(static_cast<Eigen::Index>(k));
  }
  return result;
}

AmpResult c_amp(const MeasurementMatrix& phi, const CVector& received, const AmpConfig& config) {
  check_dims(phi, received);
  require(config.max_iters >= 1, ErrorKind::InvalidArgument, "AMP needs max_iters >= 1");
  require(config.damping > 0.0 && config.damping <= 1.0, ErrorKind::InvalidArgument,
          "AMP damping must lie in (0, 1]");
  require(config.theta > 0.0 && config.tolerance > 0.0, ErrorKind::InvalidArgument,
          "AMP theta and tolerance must be positive");

  const int n_dev = phi.devices();
  const double n_res = phi.resources();
  AmpResult result;
  CVector x = CVector::Zero(n_dev);
  CVector z = received;
  const CMatrix phi_h = phi.phi.adjoint();
  const double start_norm = received.norm();
  int growth = 0;

  for (int it = 0; it < config.max_iters; ++it) {
    const double z_norm = z.norm();
    const CVector u = x + phi_h * z;
    const double tau = config.theta * z_norm / std::sqrt(n_res);

    CVector denoised = CVector::Zero(n_dev);
    double onsager = 0.0;
    for (int n = 0; n < n_dev; ++n) {
      const double mag = std::abs(u(n));
      if (mag > tau) {
        denoised(n) = u(n) * ((mag - tau) / mag);
        // per-entry divergence of the complex soft threshold, per real dimension
        onsager += 1.0 - tau / (2.0 * mag);
      }
    }
    onsager /= n_res;

    const CVector x_next = config.damping * denoised + (1.0 - config.damping) * x;
    const CVector z_next = received - phi.phi * x_next + onsager * z;
    const double change = (x_next - x).norm();
    x = x_next;
    z = z_next;
    result.iterations = it + 1;
    result.thresholds.push_back(tau);
    result.residual_norms.push_back(z.norm());

    // a residual settling onto its fixed point from below also creeps upward,
    // so growth only counts once it has passed the starting residual
    growth = z.norm() > z_norm && z.norm() > start_norm ? growth + 1 : 0;
    if (growth >= 5) {
      result.diverged = true;
      break;
    }
    if (change < config.tolerance) break;
  }

  result.estimate = x;
  result.support.assign(static_cast<std::size_t>(n_dev), 0);
  if (!result.diverged) {
    for (int n = 0; n < n_dev; ++n) result.support[n] = x(n) != Complex(0.0, 0.0) ? 1 : 0;
  }
  return result;
}

OracleResult exhaustive_oracle(const MeasurementMatrix& phi, const CVector& received, int m) {
  check_dims(phi, received);
  const int n_dev = phi.devices();
  require(n_dev <= kOracleMaxDevices, ErrorKind::InvalidArgument,
          "exhaustive oracle limited to N <= " + std::to_string(kOracleMaxDevices));
  require(m >= 1 && m <= n_dev, ErrorKind::InvalidArgument, "oracle sparsity out of range");

  std::vector<int> combo(static_cast<std::size_t>(m));
  std::iota(combo.begin(), combo.end(), 0);
  OracleResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  const double tie_tolerance = 1e-12 * (1.0 + received.norm());
  std::vector<int> best_combo;
  while (true) {
    const double r = ls_residual_norm(phi.phi, received, combo);
    // residuals equal up to rounding count as ties, which go to the earlier support
    if (r < best.residual_norm - tie_tolerance) {
      best.residual_norm = r;
      best_combo = combo;
    }
    int i = m - 1;
    while (i >= 0 && combo[i] == n_dev - m + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int k = i + 1; k < m; ++k) combo[k] = combo[k - 1] + 1;
  }
  best.support.assign(static_cast<std::size_t>(n_dev), 0);
  for (int c : best_combo) best.support[c] = 1;
  return best;
}

}  // namespace scma
