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

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scma/error.hpp"
#include "scma/harness.hpp"

namespace scma {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  fail(ErrorKind::Config, "config error at " + path + ": " + msg);
}

// Strict view of one JSON object: every key must be consumed.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) config_error(path_, "expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      config_error(at(key), "wrong type");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  void mark(const std::string& key) { seen_.insert(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string at(const std::string& key) const { return path_ + "/" + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) config_error(at(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool cond, const std::string& path, const std::string& msg) {
  if (!cond) config_error(path, msg);
}

void parse_model(Section& models, const std::string& key, nn::ModelConfig& cfg) {
  if (!models.has(key)) {
    models.mark(key);
    return;
  }
  Section s(models.raw(key), models.at(key));
  s.get("hidden_width", cfg.hidden_width);
  s.get("depth", cfg.depth);
  s.get("dropout", cfg.dropout);
  s.get("batchnorm_epsilon", cfg.batchnorm_epsilon);
  s.get("batchnorm_momentum", cfg.batchnorm_momentum);
  s.finish();
  try {
    cfg.validate();
  } catch (const Error& e) {
    config_error(models.at(key), e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "");

  if (root.has("system")) {
    Section s(root.raw("system"), "/system");
    s.get("L", c.system.resources);
    s.get("N", c.system.devices);
    s.get("J", c.system.nonzeros);
    if (s.has("codebook_path") && !s.raw("codebook_path").is_null()) {
      std::string p;
      s.get("codebook_path", p);
      c.system.codebook_path = p;
    } else {
      s.mark("codebook_path");
    }
    s.get("pilot_seed", c.system.pilot_seed);
    s.finish();
    check(c.system.resources >= 1, s.at("L"), "L must be positive");
    check(c.system.devices >= 1, s.at("N"), "N must be positive");
    check(c.system.nonzeros >= 1 && c.system.nonzeros <= c.system.resources, s.at("J"),
          "J must lie in [1, L]");
    check(static_cast<std::uint64_t>(c.system.devices) <=
              binomial(c.system.resources, c.system.nonzeros),
          s.at("N"), "N exceeds C(L, J)");
  } else {
    root.mark("system");
  }

  if (root.has("data")) {
    Section s(root.raw("data"), "/data");
    s.get("train_count", c.data.train_count);
    s.get("val_count", c.data.val_count);
    s.get("test_count", c.data.test_count);
    if (s.has("m_train") && !s.raw("m_train").is_null()) {
      int m = 0;
      s.get("m_train", m);
      check(m >= 1 && m <= c.system.devices, s.at("m_train"),
            "m_train (" + std::to_string(m) + ") must lie in [1, N = " +
                std::to_string(c.system.devices) + "]");
      c.data.m_train = m;
    } else {
      s.mark("m_train");
    }
    check(!(s.has("snr_train_range") && s.has("snr_train_db")), s.at("snr_train_db"),
          "give either snr_train_range or snr_train_db, not both");
    if (s.has("snr_train_range")) {
      std::vector<double> r;
      s.get("snr_train_range", r);
      check(r.size() == 2 && r[0] <= r[1], s.at("snr_train_range"),
            "expected [lo, hi] with lo <= hi");
      c.data.snr_train = SnrSpec::range(r[0], r[1]);
    } else {
      s.mark("snr_train_range");
    }
    if (s.has("snr_train_db")) {
      double v = 0.0;
      s.get("snr_train_db", v);
      c.data.snr_train = SnrSpec::fixed(v);
    } else {
      s.mark("snr_train_db");
    }
    s.get("seed", c.data.seed);
    s.finish();
    check(c.data.train_count >= 1, s.at("train_count"), "must be at least 1");
    check(c.data.val_count >= 1, s.at("val_count"), "must be at least 1");
  } else {
    root.mark("data");
  }

  c.dff = nn::ModelConfig::dff(c.system.resources, c.system.devices);
  c.resnet = nn::ModelConfig::resnet(c.system.resources, c.system.devices);
  if (root.has("models")) {
    Section s(root.raw("models"), "/models");
    parse_model(s, "dff", c.dff);
    parse_model(s, "resnet", c.resnet);
    s.finish();
  } else {
    root.mark("models");
  }

  if (root.has("train")) {
    Section s(root.raw("train"), "/train");
    s.get("learning_rate", c.train.learning_rate);
    s.get("batch_size", c.train.batch_size);
    s.get("epochs", c.train.epochs);
    s.get("beta1", c.train.beta1);
    s.get("beta2", c.train.beta2);
    s.get("epsilon", c.train.epsilon);
    s.finish();
    try {
      c.train.validate();
    } catch (const Error& e) {
      config_error("/train", e.what());
    }
    check(static_cast<std::size_t>(c.train.batch_size) <= c.data.train_count,
          s.at("batch_size"), "batch size exceeds train_count");
  } else {
    root.mark("train");
  }

  if (root.has("amp")) {
    Section s(root.raw("amp"), "/amp");
    s.get("theta", c.amp.theta);
    s.get("max_iters", c.amp.max_iters);
    s.get("damping", c.amp.damping);
    s.get("tolerance", c.amp.tolerance);
    s.finish();
    check(c.amp.theta > 0.0, s.at("theta"), "must be positive");
    check(c.amp.max_iters >= 1, s.at("max_iters"), "must be at least 1");
    check(c.amp.damping > 0.0 && c.amp.damping <= 1.0, s.at("damping"), "must lie in (0, 1]");
    check(c.amp.tolerance > 0.0, s.at("tolerance"), "must be positive");
  } else {
    root.mark("amp");
  }

  if (root.has("sweep")) {
    Section s(root.raw("sweep"), "/sweep");
    s.get("snr_db", c.sweep.snr_db);
    s.get("m", c.sweep.m);
    s.get("frames_per_point", c.sweep.frames_per_point);
    s.finish();
    check(!c.sweep.snr_db.empty(), s.at("snr_db"), "must be non-empty");
    check(!c.sweep.m.empty(), s.at("m"), "must be non-empty");
    for (int m : c.sweep.m) {
      check(m >= 1 && m <= c.system.devices, s.at("m"),
            "m = " + std::to_string(m) + " outside [1, N]");
    }
    check(c.sweep.frames_per_point >= 1, s.at("frames_per_point"), "must be at least 1");
  } else {
    root.mark("sweep");
  }

  root.get("methods", c.methods);
  check(!c.methods.empty(), "/methods", "must be non-empty");
  std::set<std::string> unique;
  for (const auto& m : c.methods) {
    try {
      method_kind_from_string(m);
    } catch (const Error&) {
      config_error("/methods", "unknown method '" + m + "'");
    }
    check(unique.insert(m).second, "/methods", "duplicate method '" + m + "'");
  }
  root.get("output_dir", c.output_dir);
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, "config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
  auto model = [](const nn::ModelConfig& m) {
    return json{{"hidden_width", m.hidden_width},
                {"depth", m.depth},
                {"dropout", m.dropout},
                {"batchnorm_epsilon", m.batchnorm_epsilon},
                {"batchnorm_momentum", m.batchnorm_momentum}};
  };
  json data = {{"train_count", c.data.train_count},
               {"val_count", c.data.val_count},
               {"test_count", c.data.test_count},
               {"m_train", c.data.m_train ? json(*c.data.m_train) : json(nullptr)},
               {"seed", c.data.seed}};
  if (c.data.snr_train.is_fixed()) {
    data["snr_train_db"] = c.data.snr_train.lo;
  } else {
    data["snr_train_range"] = {c.data.snr_train.lo, c.data.snr_train.hi};
  }
  return json{
      {"system",
       {{"L", c.system.resources},
        {"N", c.system.devices},
        {"J", c.system.nonzeros},
        {"codebook_path", c.system.codebook_path ? json(*c.system.codebook_path) : json(nullptr)},
        {"pilot_seed", c.system.pilot_seed}}},
      {"data", data},
      {"models", {{"dff", model(c.dff)}, {"resnet", model(c.resnet)}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"batch_size", c.train.batch_size},
        {"epochs", c.train.epochs},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"epsilon", c.train.epsilon}}},
      {"amp",
       {{"theta", c.amp.theta},
        {"max_iters", c.amp.max_iters},
        {"damping", c.amp.damping},
        {"tolerance", c.amp.tolerance}}},
      {"sweep",
       {{"snr_db", c.sweep.snr_db},
        {"m", c.sweep.m},
        {"frames_per_point", c.sweep.frames_per_point}}},
      {"methods", c.methods},
      {"output_dir", c.output_dir}};
}

}  // namespace scma
