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

#include "scma/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "scma/error.hpp"

namespace scma {

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

Confusion accumulate(Confusion conf, std::span<const std::uint8_t> truth,
                     std::span<const std::uint8_t> estimate) {
  require(truth.size() == estimate.size(), ErrorKind::DimensionMismatch,
          "truth and estimate lengths differ");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] != 0;
    const bool e = estimate[i] != 0;
    if (t && e) ++conf.tp;
    else if (e) ++conf.fp;
    else if (t) ++conf.fn;
    else ++conf.tn;
  }
  return conf;
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> pd(const Confusion& c) { return ratio(c.tp, c.tp + c.fn); }
std::optional<double> pm(const Confusion& c) { return ratio(c.fn, c.tp + c.fn); }
std::optional<double> ppv(const Confusion& c) { return ratio(c.tp, c.tp + c.fp); }

std::optional<double> f1_paper(std::optional<double> pd, std::optional<double> ppv) {
  if (!pd || !ppv || *pd + *ppv == 0.0) return std::nullopt;
  return *ppv * *pd / (*ppv + *pd);
}

std::optional<double> f1_standard(std::optional<double> pd, std::optional<double> ppv) {
  auto half = f1_paper(pd, ppv);
  if (!half) return std::nullopt;
  return 2.0 * *half;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  require(scores.size() == labels.size(), ErrorKind::DimensionMismatch,
          "AUC scores and labels lengths differ");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average ranks over tie groups (1-based)
  double positive_rank_sum = 0.0;
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = n - positives;
  require(positives > 0 && negatives > 0, ErrorKind::InvalidArgument,
          "AUC needs at least one positive and one negative label");
  const double p = static_cast<double>(positives);
  const double q = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

void ScoreLog::append(std::span<const double> s, std::span<const std::uint8_t> l) {
  require(s.size() == l.size(), ErrorKind::DimensionMismatch, "score/label lengths differ");
  scores.insert(scores.end(), s.begin(), s.end());
  labels.insert(labels.end(), l.begin(), l.end());
}

std::optional<double> ScoreLog::auc() const {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) return std::nullopt;
  return scma::auc(scores, labels);
}

std::string format_metric(std::optional<double> value) {
  if (!value) return kNotAvailable;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *value);
  return buf;
}

std::string metrics_csv_header() {
  return "snr_db,m,method,pd,pm,ppv,f1_paper,f1_standard,auc,frames";
}

std::string metrics_csv_row(const MetricRow& row) {
  const auto d = pd(row.confusion);
  const auto p = ppv(row.confusion);
  char snr[32];
  std::snprintf(snr, sizeof snr, "%g", row.snr_db);
  return std::string(snr) + "," + std::to_string(row.m) + "," + row.method + "," +
         format_metric(d) + "," + format_metric(pm(row.confusion)) + "," +
         format_metric(p) + "," + format_metric(f1_paper(d, p)) + "," +
         format_metric(f1_standard(d, p)) + "," + format_metric(row.auc) + "," +
         std::to_string(row.frames);
}

}  // namespace scma
