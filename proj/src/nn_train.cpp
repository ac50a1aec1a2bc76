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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "scma/error.hpp"
#include "scma/metrics.hpp"
#include "scma/nn.hpp"

namespace scma::nn {

void TrainConfig::validate() const {
  require(learning_rate > 0.0, ErrorKind::InvalidArgument, "learning rate must be positive");
  require(batch_size >= 1, ErrorKind::InvalidArgument, "batch size must be positive");
  require(epochs >= 1, ErrorKind::InvalidArgument, "epochs must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          ErrorKind::InvalidArgument, "Adam moment decays must lie in [0, 1)");
  require(epsilon > 0.0, ErrorKind::InvalidArgument, "Adam epsilon must be positive");
}

void adam_step(Model& model, Gradients& grads, AdamState& state, const TrainConfig& config) {
  auto params = parameter_views(model);
  auto g = parameter_views(grads);
  require(params.size() == g.size(), ErrorKind::DimensionMismatch,
          "gradient layout does not match the model");
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
      state.second.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
    }
  }
  require(state.first.size() == params.size(), ErrorKind::DimensionMismatch,
          "Adam state does not match the model");

  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    require(g[k].size() == params[k].size(), ErrorKind::DimensionMismatch,
            "gradient tensor size mismatch");
    double* m = state.first[k].data();
    double* v = state.second[k].data();
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      const double gi = g[k][i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
      params[k][i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
  }
  ++model.revision;
}

Matrix dataset_inputs(const Dataset& data) {
  const int d = data.meta.input_dim();
  Matrix x(d, static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.input(i);
    for (int k = 0; k < d; ++k) x(k, static_cast<Eigen::Index>(i)) = row[k];
  }
  return x;
}

Matrix dataset_labels(const Dataset& data) {
  const int n = data.meta.devices;
  Matrix y(n, static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.label(i);
    for (int k = 0; k < n; ++k) y(k, static_cast<Eigen::Index>(i)) = row[k];
  }
  return y;
}

namespace {

Matrix gather(const Matrix& src, std::span<const std::size_t> cols) {
  Matrix out(src.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = src.col(static_cast<Eigen::Index>(cols[j]));
  }
  return out;
}

Matrix predict_chunked(const Model& model, const Matrix& x) {
  constexpr Eigen::Index kChunk = 4096;
  Matrix probs(model.config.output_dim, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); c += kChunk) {
    const Eigen::Index n = std::min(kChunk, x.cols() - c);
    probs.middleCols(c, n) = predict(model, x.middleCols(c, n));
  }
  return probs;
}

struct Validation {
  double loss = 0.0;
  std::optional<double> pd;
  std::optional<double> ppv;
  std::optional<double> auc;
};

Validation validate(const Model& model, const Matrix& x, const Matrix& y) {
  const Matrix probs = predict_chunked(model, x);
  Validation v;
  v.loss = bce_loss(probs, y);
  Confusion conf;
  ScoreLog log;
  const auto n = static_cast<std::size_t>(y.rows());
  std::vector<std::uint8_t> truth(n);
  std::vector<double> p(n);
  for (Eigen::Index q = 0; q < y.cols(); ++q) {
    int active = 0;
    for (std::size_t k = 0; k < n; ++k) {
      truth[k] = y(static_cast<Eigen::Index>(k), q) > 0.5 ? 1 : 0;
      active += truth[k];
      p[k] = probs(static_cast<Eigen::Index>(k), q);
    }
    const auto est = select_support(p, SelectionPolicy::top_m(active));
    conf = accumulate(conf, truth, est);
    log.append(p, truth);
  }
  v.pd = scma::pd(conf);
  v.ppv = scma::ppv(conf);
  v.auc = log.auc();
  return v;
}

}  // namespace

TrainHistory train(Model& model, const Dataset& train_set, const Dataset& val_set,
                   const TrainConfig& config) {
  config.validate();
  require(train_set.size() > 0 && val_set.size() > 0, ErrorKind::InvalidArgument,
          "training and validation sets must be non-empty");
  require(static_cast<std::size_t>(config.batch_size) <= train_set.size(),
          ErrorKind::InvalidArgument, "batch size exceeds the training set size");
  require(train_set.meta.input_dim() == model.config.input_dim &&
              train_set.meta.devices == model.config.output_dim &&
              val_set.meta.input_dim() == model.config.input_dim &&
              val_set.meta.devices == model.config.output_dim,
          ErrorKind::DimensionMismatch, "dataset dimensions do not match the model");
  const bool has_norm = !model.norms.empty();
  require(!has_norm || config.batch_size >= 2, ErrorKind::InvalidArgument,
          "batch normalization needs a batch size of at least 2");

  const Matrix x = dataset_inputs(train_set);
  const Matrix y = dataset_labels(train_set);
  const Matrix vx = dataset_inputs(val_set);
  const Matrix vy = dataset_labels(val_set);

  Rng rng(derive_seed(config.seed, {tag_of("train")}));
  AdamState adam;
  TrainHistory history;
  Model best = model;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      if (has_norm && n < 2) break;
      const std::span<const std::size_t> idx(order.data() + start, n);
      const Matrix bx = gather(x, idx);
      const Matrix by = gather(y, idx);
      const ForwardCache cache = forward(model, bx, Mode::Train, rng);
      loss_sum += bce_loss(cache.probs, by) * static_cast<double>(n);
      seen += n;
      Gradients g = backward(model, cache, by);
      update_running_stats(model, cache);
      adam_step(model, g, adam, config);
    }

    const Validation v = validate(model, vx, vy);
    history.epochs.push_back({epoch, loss_sum / static_cast<double>(seen), v.loss, v.pd, v.ppv, v.auc});
    if (v.loss < best_loss) {
      best_loss = v.loss;
      best = model;
      history.best_epoch = epoch;
    }
  }

  history.loss_increased =
      history.epochs.back().train_loss > history.epochs.front().train_loss;
  model = std::move(best);
  round_to_float(model);
  model.trained = true;
  ++model.revision;
  return history;
}

std::string history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,val_pd,val_ppv,val_auc,best\n";
  for (const auto& e : history.epochs) {
    char buf[64];
    out << e.epoch << ',';
    std::snprintf(buf, sizeof buf, "%.8f,%.8f", e.train_loss, e.val_loss);
    out << buf << ',' << format_metric(e.val_pd) << ',' << format_metric(e.val_ppv) << ','
        << format_metric(e.val_auc) << ',' << (e.epoch == history.best_epoch ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<std::uint8_t> select_support(std::span<const double> probs,
                                         const SelectionPolicy& policy) {
  const std::size_t n = probs.size();
  std::vector<std::uint8_t> out(n, 0);
  if (policy.kind == SelectionPolicy::Kind::Threshold) {
    for (std::size_t i = 0; i < n; ++i) out[i] = probs[i] > policy.threshold ? 1 : 0;
    return out;
  }
  require(policy.m >= 0 && static_cast<std::size_t>(policy.m) <= n, ErrorKind::InvalidArgument,
          "top-m selection with m = " + std::to_string(policy.m) + " exceeds N = " +
              std::to_string(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  for (int k = 0; k < policy.m; ++k) out[idx[k]] = 1;
  return out;
}

}  // namespace scma::nn
