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
#include <fstream>
#include <limits>

#include <doctest.h>

#include "scma/error.hpp"
#include "scma/metrics.hpp"
#include "scma/nn.hpp"
#include "test_util.hpp"

using namespace scma;
using namespace scma::nn;

namespace {

// L=2, N=2, J=1: each device owns one resource element.
MeasurementMatrix tiny_phi() {
  return measurement_matrix(build_codebook(build_factor_graph(2, 2, 1)), assign_pilots(2, 1));
}

const double kNoiseless = std::numeric_limits<double>::infinity();

struct Tiny {
  Model model;
  Dataset train;
  Dataset val;
  TrainConfig cfg;
};

Tiny tiny_task(Architecture arch) {
  const auto phi = tiny_phi();
  Tiny t;
  t.train = generate_dataset(phi, 1, SnrSpec::fixed(kNoiseless), 2000, 1);
  t.val = generate_dataset(phi, 1, SnrSpec::fixed(kNoiseless), 500, 2);
  auto mc = arch == Architecture::DFF ? ModelConfig::dff(2, 2) : ModelConfig::resnet(2, 2);
  mc.hidden_width = 16;
  if (arch == Architecture::ResNet) mc.depth = 2;
  t.model = init_model(mc, 5);
  t.cfg.batch_size = 50;
  t.cfg.epochs = 20;
  t.cfg.seed = 9;
  return t;
}

double detection_rate(const Model& model, const Dataset& data) {
  const Matrix probs = predict(model, dataset_inputs(data));
  Confusion conf;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> p(probs.rows());
    for (Eigen::Index k = 0; k < probs.rows(); ++k) p[k] = probs(k, static_cast<Eigen::Index>(i));
    conf = accumulate(conf, data.label(i), select_support(p, SelectionPolicy::top_m(1)));
  }
  return *pd(conf);
}

}  // namespace

TEST_CASE("tiny noiseless task is learned") {
  for (auto arch : {Architecture::DFF, Architecture::ResNet}) {
    auto t = tiny_task(arch);
    const auto history = train(t.model, t.train, t.val, t.cfg);
    REQUIRE(history.epochs.size() == 20);
    const auto& best = history.epochs[history.best_epoch - 1];
    REQUIRE(best.val_pd.has_value());
    CHECK(*best.val_pd >= 0.99);
    CHECK(detection_rate(t.model, t.val) >= 0.99);
    CHECK(t.model.trained);
  }
}

TEST_CASE("training loss does not end above where it started") {
  for (auto arch : {Architecture::DFF, Architecture::ResNet}) {
    auto t = tiny_task(arch);
    const auto h = train(t.model, t.train, t.val, t.cfg);
    CHECK(h.epochs.back().train_loss <= h.epochs.front().train_loss);
    CHECK_FALSE(h.loss_increased);
  }
}

TEST_CASE("best epoch has the lowest validation loss") {
  auto t = tiny_task(Architecture::DFF);
  const auto h = train(t.model, t.train, t.val, t.cfg);
  for (const auto& e : h.epochs) CHECK(h.epochs[h.best_epoch - 1].val_loss <= e.val_loss);
  // the returned model is the best epoch's, rounded to float32
  const double loss = bce_loss(predict(t.model, dataset_inputs(t.val)), dataset_labels(t.val));
  CHECK(loss == doctest::Approx(h.epochs[h.best_epoch - 1].val_loss).epsilon(1e-3));
}

TEST_CASE("training is reproducible from the seed") {
  auto a = tiny_task(Architecture::ResNet);
  auto b = tiny_task(Architecture::ResNet);
  a.cfg.epochs = b.cfg.epochs = 4;
  const auto ha = train(a.model, a.train, a.val, a.cfg);
  const auto hb = train(b.model, b.train, b.val, b.cfg);
  CHECK(history_csv(ha) == history_csv(hb));
  for (std::size_t i = 0; i < a.model.dense.size(); ++i) {
    CHECK(a.model.dense[i].weight == b.model.dense[i].weight);
  }
  auto c = tiny_task(Architecture::ResNet);
  c.cfg.epochs = 4;
  c.cfg.seed = 10;
  CHECK(history_csv(train(c.model, c.train, c.val, c.cfg)) != history_csv(ha));
}

TEST_CASE("history CSV") {
  auto t = tiny_task(Architecture::DFF);
  t.cfg.epochs = 3;
  const auto h = train(t.model, t.train, t.val, t.cfg);
  const std::string csv = history_csv(h);
  CHECK(csv.rfind("epoch,train_loss,val_loss,val_pd,val_ppv,val_auc,best\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("train rejects bad inputs") {
  auto t = tiny_task(Architecture::ResNet);
  TrainConfig cfg = t.cfg;
  cfg.batch_size = 5000;
  CHECK_THROWS_AS(train(t.model, t.train, t.val, cfg), Error);
  cfg = t.cfg;
  cfg.batch_size = 1;
  CHECK_THROWS_AS(train(t.model, t.train, t.val, cfg), Error);
  cfg = t.cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(t.model, t.train, t.val, cfg), Error);
  const auto wrong = generate_dataset(
      measurement_matrix(build_codebook(build_factor_graph(4, 6, 2)), assign_pilots(6, 1)), 1,
      SnrSpec::fixed(10), 100, 1);
  CHECK_THROWS_AS(train(t.model, wrong, t.val, t.cfg), Error);
  CHECK_THROWS_AS(train(t.model, t.train.slice(0, 0), t.val, t.cfg), Error);
}

TEST_CASE("model files round trip bit-exactly") {
  testing::TempDir dir("model");
  for (auto arch : {Architecture::DFF, Architecture::ResNet}) {
    auto t = tiny_task(arch);
    t.cfg.epochs = 2;
    train(t.model, t.train, t.val, t.cfg);
    const std::string path = dir.file("m.bin");
    save_model(t.model, path);
    const Model back = load_model(path);
    CHECK(back.trained);
    CHECK(back.config.architecture == arch);
    CHECK(back.config.depth == t.model.config.depth);
    const Matrix probe = dataset_inputs(t.val.slice(0, 64));
    CHECK(predict(back, probe) == predict(t.model, probe));
    for (std::size_t i = 0; i < back.norms.size(); ++i) {
      CHECK(back.norms[i].running_mean == t.model.norms[i].running_mean);
      CHECK(back.norms[i].running_var == t.model.norms[i].running_var);
    }
    // the probe must match the stored input width
    CHECK_THROWS_AS(predict(back, Matrix::Zero(8, 3)), Error);
  }
}

TEST_CASE("damaged model files are rejected") {
  testing::TempDir dir("model_bad");
  auto mc = ModelConfig::resnet(4, 6);
  mc.hidden_width = 8;
  mc.depth = 2;
  save_model(init_model(mc, 1), dir.file("m.bin"));
  std::ifstream in(dir.file("m.bin"), std::ios::binary);
  const std::string bytes{std::istreambuf_iterator<char>(in), {}};
  auto write = [&](const std::string& s) {
    std::ofstream out(dir.file("bad.bin"), std::ios::binary);
    out << s;
  };

  write(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_model(dir.file("bad.bin")), Error);

  write(bytes + "x");
  CHECK_THROWS_AS(load_model(dir.file("bad.bin")), Error);

  std::string version = bytes;
  version.replace(version.find("\"format_version\":1"), 18, "\"format_version\":2");
  write(version);
  CHECK_THROWS_AS(load_model(dir.file("bad.bin")), Error);

  std::string width = bytes;
  width.replace(width.find("\"hidden_width\":8"), 16, "\"hidden_width\":9");
  write(width);
  CHECK_THROWS_AS(load_model(dir.file("bad.bin")), Error);

  std::string magic = bytes;
  magic[5] = '?';
  write(magic);
  CHECK_THROWS_AS(load_model(dir.file("bad.bin")), Error);
  CHECK_THROWS_AS(load_model(dir.file("absent.bin")), Error);
}
