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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scma {

// Per-device-slot counters. Mergeable by addition.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o);
  friend Confusion operator+(Confusion a, const Confusion& b) { return a += b; }
  bool operator==(const Confusion&) const = default;
};

Confusion accumulate(Confusion conf, std::span<const std::uint8_t> truth,
                     std::span<const std::uint8_t> estimate);

// Ratios return std::nullopt when the denominator is zero.
std::optional<double> pd(const Confusion& c);   // tp / (tp + fn)
std::optional<double> pm(const Confusion& c);   // fn / (tp + fn)
std::optional<double> ppv(const Confusion& c);  // tp / (tp + fp)

// PPV * P_D / (PPV + P_D), without the usual factor 2.
std::optional<double> f1_paper(std::optional<double> pd, std::optional<double> ppv);
// 2 * PPV * P_D / (PPV + P_D)
std::optional<double> f1_standard(std::optional<double> pd, std::optional<double> ppv);

// Mann-Whitney AUC; tied scores contribute 1/2. Throws when only one class
// is present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Scores accumulated over frames for a deferred AUC.
struct ScoreLog {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  void append(std::span<const double> s, std::span<const std::uint8_t> l);
  std::optional<double> auc() const;
};

struct MetricRow {
  double snr_db = 0.0;
  int m = 0;
  std::string method;
  Confusion confusion;
  std::optional<double> auc;
  std::uint64_t frames = 0;
  std::uint64_t exact_frames = 0;  // frames whose estimated support is exact
};

inline constexpr const char* kNotAvailable = "NA";

std::string format_metric(std::optional<double> value);

// snr_db,m,method,pd,pm,ppv,f1_paper,f1_standard,auc,frames
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricRow& row);

}  // namespace scma
