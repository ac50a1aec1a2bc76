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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scma/signal.hpp"

namespace scma {

// SNR of generated frames: fixed when lo == hi, otherwise drawn uniformly
// from [lo, hi] per sample.
struct SnrSpec {
  double lo = 0.0;
  double hi = 0.0;

  static SnrSpec fixed(double snr_db) { return {snr_db, snr_db}; }
  static SnrSpec range(double lo, double hi) { return {lo, hi}; }
  bool is_fixed() const { return lo == hi; }
};

struct DatasetMeta {
  int resources = 0;  // L
  int devices = 0;    // N
  int active = 0;     // m
  SnrSpec snr;
  std::uint64_t seed = 0;
  std::size_t count = 0;

  int input_dim() const { return 2 * resources; }
};

// Row-major float32 inputs (count x 2L) and uint8 labels (count x N).
struct Dataset {
  DatasetMeta meta;
  std::vector<float> inputs;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return meta.count; }
  std::span<const float> input(std::size_t i) const;
  std::span<const std::uint8_t> label(std::size_t i) const;
  Dataset slice(std::size_t begin, std::size_t end) const;

  bool operator==(const Dataset& other) const;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// [Re(y_1) .. Re(y_L), Im(y_1) .. Im(y_L)]
Eigen::VectorXd stack_real_imag(const CVector& received);

// Frames are generated in fixed-size shards, each with its own derived
// stream, so the corpus depends only on the seed and never on `threads`.
Dataset generate_dataset(const MeasurementMatrix& phi, int active_devices,
                         SnrSpec snr, std::size_t count, std::uint64_t seed,
                         int threads = 1);

// Contiguous 80/10/10 blocks of the generated stream.
DatasetSplit split_dataset(const Dataset& data);

// "SCMA-AUD-DS1" magic line, JSON meta line, float32 inputs, uint8 labels.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

inline constexpr std::size_t kDatasetShardSize = 4096;

}  // namespace scma
