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

#include <doctest.h>

#include "fd_oracle.hpp"
#include "scma/error.hpp"
#include "scma/nn.hpp"

using namespace scma;
using namespace scma::nn;
using scma::testing::check_gradients;
using scma::testing::gradient_problem;

TEST_CASE("DFF gradients match central differences") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto p = gradient_problem(Architecture::DFF, seed);
    const auto r = check_gradients(p.model, p.batch, p.labels, p.masks);
    INFO("seed " << seed << " worst at " << r.worst_location);
    CHECK(r.parameters == 4 * 4 + 4 + 2 * (4 * 4 + 4) + 3 * 4 + 3);
    CHECK(r.worst_relative_error < 1e-3);
  }
}

TEST_CASE("ResNet gradients match central differences") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto p = gradient_problem(Architecture::ResNet, seed);
    const auto r = check_gradients(p.model, p.batch, p.labels, p.masks);
    INFO("seed " << seed << " worst at " << r.worst_location);
    // dense: in 4x4+4, two blocks 4x4+4, out 3x4+3; norms: 3 x (4 + 4)
    CHECK(r.parameters == 20 + 2 * 20 + 15 + 3 * 8);
    CHECK(r.worst_relative_error < 1e-3);
  }
}

TEST_CASE("ResNet with no blocks still differentiates through the input norm") {
  auto p = gradient_problem(Architecture::ResNet, 9);
  p.model.config.depth = 0;
  p.model.dense = {p.model.dense.front(), p.model.dense.back()};
  p.model.norms = {p.model.norms.front()};
  p.masks.clear();
  const auto r = check_gradients(p.model, p.batch, p.labels, p.masks);
  CHECK(r.worst_relative_error < 1e-3);
}

TEST_CASE("stationary point has zero gradient") {
  for (auto arch : {Architecture::DFF, Architecture::ResNet}) {
    auto p = gradient_problem(arch, 21);
    // identical samples and zero output layer: every probability is 0.5
    for (Eigen::Index c = 1; c < p.batch.cols(); ++c) p.batch.col(c) = p.batch.col(0);
    p.model.dense.back().weight.setZero();
    p.model.dense.back().bias.setZero();
    // each output sees exactly half positives
    p.labels.setZero();
    p.labels.leftCols(p.batch.cols() / 2).setOnes();
    for (auto& m : p.masks) {
      for (Eigen::Index c = 1; c < m.cols(); ++c) m.col(c) = m.col(0);
    }
    Rng unused(0);
    const auto cache = forward(p.model, p.batch, Mode::Train, unused, &p.masks);
    CHECK(cache.probs == Matrix::Constant(3, p.batch.cols(), 0.5));
    auto grads = backward(p.model, cache, p.labels);
    for (auto view : parameter_views(grads)) {
      for (double g : view) CHECK(std::abs(g) < 1e-15);
    }
    const auto r = check_gradients(p.model, p.batch, p.labels, p.masks);
    CHECK(r.worst_relative_error < 1e-3);
  }
}

TEST_CASE("dropped units receive no gradient") {
  auto p = gradient_problem(Architecture::DFF, 33);
  // drop hidden unit 2 of layer 1 for every sample
  p.masks[1].row(2).setZero();
  Rng unused(0);
  const auto cache = forward(p.model, p.batch, Mode::Train, unused, &p.masks);
  const auto g = backward(p.model, cache, p.labels);
  CHECK(g.dense[1].weight.row(2).isZero(0.0));
  CHECK(g.dense[1].bias(2) == 0.0);
  CHECK(g.dense[2].weight.col(2).isZero(0.0));
  CHECK(!g.dense[2].weight.isZero(0.0));

  auto q = gradient_problem(Architecture::ResNet, 33);
  q.masks[0].row(1).setZero();
  const auto rc = forward(q.model, q.batch, Mode::Train, unused, &q.masks);
  const auto rg = backward(q.model, rc, q.labels);
  CHECK(rg.dense[1].weight.row(1).isZero(0.0));
  CHECK(rg.norms[1].scale(1) == 0.0);
  CHECK(rg.norms[1].shift(1) == 0.0);
}

TEST_CASE("backward rejects stale or inference caches") {
  auto p = gradient_problem(Architecture::DFF, 4);
  Rng rng(0);
  const auto cache = forward(p.model, p.batch, Mode::Train, rng, &p.masks);
  CHECK_NOTHROW(backward(p.model, cache, p.labels));

  Model changed = p.model;
  Gradients g = backward(changed, cache, p.labels);
  AdamState state;
  adam_step(changed, g, state, TrainConfig{});
  CHECK_THROWS_AS(backward(changed, cache, p.labels), Error);

  const auto infer = forward(p.model, p.batch, Mode::Infer, rng);
  CHECK_THROWS_AS(backward(p.model, infer, p.labels), Error);
  CHECK_THROWS_AS(backward(p.model, cache, Matrix::Zero(2, 6)), Error);

  auto r = gradient_problem(Architecture::ResNet, 4);
  CHECK_THROWS_AS(backward(r.model, cache, r.labels), Error);
}

TEST_CASE("Adam first step moves each parameter by the learning rate") {
  auto p = gradient_problem(Architecture::ResNet, 6);
  const Model before = p.model;
  Gradients g = zero_gradients(p.model);
  int k = 0;
  for (auto view : parameter_views(g)) {
    for (double& v : view) {
      v = (k % 2 ? 1.0 : -1.0) * (0.01 + 0.001 * k);
      ++k;
    }
  }
  AdamState state;
  TrainConfig cfg;
  adam_step(p.model, g, state, cfg);
  Model ref = before;
  auto now = parameter_views(p.model);
  auto was = parameter_views(ref);
  auto grads = parameter_views(g);
  for (std::size_t t = 0; t < now.size(); ++t) {
    for (std::size_t i = 0; i < now[t].size(); ++i) {
      const double sign = grads[t][i] > 0 ? 1.0 : -1.0;
      CHECK(std::abs((now[t][i] - was[t][i]) + cfg.learning_rate * sign) < 1e-6);
    }
  }
  CHECK(state.step == 1);
  CHECK(p.model.revision == before.revision + 1);
}

TEST_CASE("Adam with zero gradients leaves parameters unchanged") {
  auto p = gradient_problem(Architecture::DFF, 7);
  Model ref = p.model;
  Gradients g = zero_gradients(p.model);
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_step(p.model, g, state, TrainConfig{});
  auto a = parameter_views(p.model);
  auto b = parameter_views(ref);
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) CHECK(a[t][i] == b[t][i]);
  }
}

TEST_CASE("Adam state must match the model") {
  auto p = gradient_problem(Architecture::DFF, 7);
  auto r = gradient_problem(Architecture::ResNet, 7);
  Gradients g = zero_gradients(p.model);
  AdamState state;
  adam_step(p.model, g, state, TrainConfig{});
  Gradients rg = zero_gradients(r.model);
  CHECK_THROWS_AS(adam_step(r.model, rg, state, TrainConfig{}), Error);
  CHECK_THROWS_AS(adam_step(r.model, g, state, TrainConfig{}), Error);
}

TEST_CASE("optimizer trajectories are reproducible") {
  auto run = [] {
    auto p = gradient_problem(Architecture::ResNet, 8);
    Rng rng(123);
    AdamState state;
    for (int step = 0; step < 25; ++step) {
      const auto cache = forward(p.model, p.batch, Mode::Train, rng);
      Gradients g = backward(p.model, cache, p.labels);
      update_running_stats(p.model, cache);
      adam_step(p.model, g, state, TrainConfig{});
    }
    return p.model;
  };
  const Model a = run();
  const Model b = run();
  for (std::size_t i = 0; i < a.dense.size(); ++i) {
    CHECK(a.dense[i].weight == b.dense[i].weight);
    CHECK(a.dense[i].bias == b.dense[i].bias);
  }
  for (std::size_t i = 0; i < a.norms.size(); ++i) {
    CHECK(a.norms[i].running_mean == b.norms[i].running_mean);
    CHECK(a.norms[i].running_var == b.norms[i].running_var);
  }
}

TEST_CASE("running statistics follow an exponential moving average") {
  auto p = gradient_problem(Architecture::ResNet, 10);
  Rng rng(1);
  const auto cache = forward(p.model, p.batch, Mode::Train, rng);
  const Vector m0 = p.model.norms[0].running_mean;
  const Vector v0 = p.model.norms[0].running_var;
  update_running_stats(p.model, cache);
  const double mom = p.model.config.batchnorm_momentum;
  CHECK((p.model.norms[0].running_mean - (mom * m0 + (1 - mom) * cache.norms[0].mean)).norm() <
        1e-15);
  CHECK((p.model.norms[0].running_var - (mom * v0 + (1 - mom) * cache.norms[0].var)).norm() <
        1e-15);
  CHECK((p.model.norms[0].running_var.array() >= 0.0).all());
}
