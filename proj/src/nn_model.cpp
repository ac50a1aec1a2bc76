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
#include <fstream>

#include <nlohmann/json.hpp>

#include "scma/binary_io.hpp"
#include "scma/error.hpp"
#include "scma/nn.hpp"

namespace scma::nn {

namespace {

constexpr const char* kMagic = "SCMA-AUD-NN1";
constexpr int kFormatVersion = 1;

DenseLayer make_dense(int out, int in, Rng& rng) {
  const double limit = std::sqrt(6.0 / in);
  std::uniform_real_distribution<double> u(-limit, limit);
  DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
  for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
    layer.weight.data()[i] = static_cast<float>(u(rng));
  }
  return layer;
}

BatchNormLayer make_norm(int width) {
  return {Vector::Ones(width), Vector::Zero(width), Vector::Zero(width), Vector::Ones(width)};
}

const Matrix& mask_for(std::size_t site, const Matrix& activations, double p, Mode mode,
                       Rng& rng, const DropoutMasks* fixed, ForwardCache& cache) {
  if (fixed) {
    require(site < fixed->size(), ErrorKind::InvalidArgument, "missing fixed dropout mask");
    const Matrix& m = (*fixed)[site];
    require(m.rows() == activations.rows() && m.cols() == activations.cols(),
            ErrorKind::DimensionMismatch, "fixed dropout mask shape mismatch");
    cache.masks.push_back(m);
  } else {
    Matrix m;
    dropout(activations, p, mode, rng, &m);
    cache.masks.push_back(std::move(m));
  }
  return cache.masks.back();
}

void check_input(const Model& model, const Matrix& batch) {
  require(batch.rows() == model.config.input_dim, ErrorKind::DimensionMismatch,
          "model expects inputs of length " + std::to_string(model.config.input_dim) +
              ", got " + std::to_string(batch.rows()));
  require(batch.cols() >= 1, ErrorKind::InvalidArgument, "empty batch");
}

Matrix logit_gradient(const ForwardCache& cache, const Matrix& labels) {
  require(labels.rows() == cache.probs.rows() && labels.cols() == cache.probs.cols(),
          ErrorKind::DimensionMismatch, "label shape does not match the forward pass");
  const double scale = 1.0 / static_cast<double>(cache.probs.size());
  Matrix d(cache.probs.rows(), cache.probs.cols());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double p = cache.probs.data()[i];
    // the clamp makes the loss flat outside [eps, 1 - eps]
    const bool clamped = p < kProbabilityClamp || p > 1.0 - kProbabilityClamp;
    d.data()[i] = clamped ? 0.0 : (p - labels.data()[i]) * scale;
  }
  return d;
}

void dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& d_out,
                    DenseLayer& grad, Matrix* d_input) {
  grad.weight.noalias() = d_out * input.transpose();
  grad.bias = d_out.rowwise().sum();
  if (d_input) d_input->noalias() = layer.weight.transpose() * d_out;
}

Matrix batchnorm_backward(const BatchNormLayer& layer, const BatchNormCache& cache,
                          const Matrix& d_out, BatchNormLayer& grad) {
  const double q = static_cast<double>(d_out.cols());
  grad.scale = d_out.cwiseProduct(cache.normalized).rowwise().sum();
  grad.shift = d_out.rowwise().sum();
  const Matrix d_norm = d_out.array().colwise() * layer.scale.array();
  const Vector sum_d = d_norm.rowwise().sum();
  const Vector sum_dx = d_norm.cwiseProduct(cache.normalized).rowwise().sum();
  Matrix d_in = (q * d_norm).colwise() - sum_d;
  d_in -= (cache.normalized.array().colwise() * sum_dx.array()).matrix();
  return (d_in.array().colwise() * (cache.inv_std.array() / q)).matrix();
}

Matrix relu_gate(const Matrix& grad, const Matrix& pre) {
  return (pre.array() > 0.0).select(grad, 0.0);
}

}  // namespace

std::string to_string(Architecture a) { return a == Architecture::DFF ? "dff" : "resnet"; }

Architecture architecture_from_string(const std::string& s) {
  if (s == "dff") return Architecture::DFF;
  if (s == "resnet") return Architecture::ResNet;
  fail(ErrorKind::InvalidArgument, "unknown architecture '" + s + "'");
}

ModelConfig ModelConfig::dff(int resources, int devices) {
  ModelConfig c;
  c.architecture = Architecture::DFF;
  c.input_dim = 2 * resources;
  c.output_dim = devices;
  c.depth = 12;
  return c;
}

ModelConfig ModelConfig::resnet(int resources, int devices) {
  ModelConfig c;
  c.architecture = Architecture::ResNet;
  c.input_dim = 2 * resources;
  c.output_dim = devices;
  c.depth = 9;
  return c;
}

void ModelConfig::validate() const {
  require(input_dim >= 1 && output_dim >= 1, ErrorKind::InvalidArgument,
          "model input and output dimensions must be positive");
  require(hidden_width >= 1, ErrorKind::InvalidArgument, "hidden width must be at least 1");
  if (architecture == Architecture::DFF) {
    require(depth >= 1, ErrorKind::InvalidArgument, "DFF depth must be at least 1");
  } else {
    require(depth >= 0, ErrorKind::InvalidArgument, "ResNet block count must be nonnegative");
  }
  require(dropout >= 0.0 && dropout < 1.0, ErrorKind::InvalidArgument,
          "dropout probability must lie in [0, 1)");
  require(batchnorm_epsilon >= 0.0, ErrorKind::InvalidArgument,
          "batch-norm epsilon must be nonnegative");
  require(batchnorm_momentum >= 0.0 && batchnorm_momentum <= 1.0,
          ErrorKind::InvalidArgument, "batch-norm momentum must lie in [0, 1]");
}

Model init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, {tag_of("init")}));
  Model model;
  model.config = config;
  const int width = config.hidden_width;
  if (config.architecture == Architecture::DFF) {
    for (int i = 0; i < config.depth; ++i) {
      const int in = i == 0 ? config.input_dim : width;
      const int out = i == config.depth - 1 ? config.output_dim : width;
      model.dense.push_back(make_dense(out, in, rng));
    }
  } else {
    model.dense.push_back(make_dense(width, config.input_dim, rng));
    model.norms.push_back(make_norm(width));
    for (int t = 0; t < config.depth; ++t) {
      model.dense.push_back(make_dense(width, width, rng));
      model.norms.push_back(make_norm(width));
    }
    model.dense.push_back(make_dense(config.output_dim, width, rng));
  }
  return model;
}

ForwardCache forward(const Model& model, const Matrix& batch, Mode mode, Rng& rng,
                     const DropoutMasks* fixed_masks) {
  return model.config.architecture == Architecture::DFF
             ? forward_dff(model, batch, mode, rng, fixed_masks)
             : forward_resnet(model, batch, mode, rng, fixed_masks);
}

ForwardCache forward_dff(const Model& model, const Matrix& batch, Mode mode, Rng& rng,
                         const DropoutMasks* fixed_masks) {
  require(model.config.architecture == Architecture::DFF, ErrorKind::InvalidArgument,
          "forward_dff called on a non-DFF model");
  check_input(model, batch);
  ForwardCache cache;
  cache.mode = mode;
  cache.revision = model.revision;
  cache.architecture = Architecture::DFF;

  Matrix h = batch;
  const std::size_t hidden = model.dense.size() - 1;
  for (std::size_t i = 0; i < hidden; ++i) {
    const auto& layer = model.dense[i];
    Matrix a = dense_forward(layer.weight, layer.bias, h);
    const Matrix r = relu(a);
    const Matrix& m = mask_for(i, r, model.config.dropout, mode, rng, fixed_masks, cache);
    cache.layer_inputs.push_back(std::move(h));
    h = r.cwiseProduct(m);
    cache.pre_activations.push_back(std::move(a));
  }
  const auto& out = model.dense.back();
  cache.logits = dense_forward(out.weight, out.bias, h);
  cache.layer_inputs.push_back(std::move(h));
  cache.probs = sigmoid(cache.logits);
  return cache;
}

ForwardCache forward_resnet(const Model& model, const Matrix& batch, Mode mode, Rng& rng,
                            const DropoutMasks* fixed_masks) {
  require(model.config.architecture == Architecture::ResNet, ErrorKind::InvalidArgument,
          "forward_resnet called on a non-ResNet model");
  check_input(model, batch);
  const double eps = model.config.batchnorm_epsilon;
  ForwardCache cache;
  cache.mode = mode;
  cache.revision = model.revision;
  cache.architecture = Architecture::ResNet;
  cache.norms.resize(model.norms.size());

  cache.layer_inputs.push_back(batch);
  cache.pre_activations.push_back(
      dense_forward(model.dense[0].weight, model.dense[0].bias, batch));
  Matrix stream =
      batchnorm_forward(cache.pre_activations[0], model.norms[0], eps, mode, &cache.norms[0]);

  const std::size_t blocks = model.norms.size() - 1;
  for (std::size_t t = 1; t <= blocks; ++t) {
    const auto& layer = model.dense[t];
    Matrix in = relu(stream);
    Matrix a = dense_forward(layer.weight, layer.bias, in);
    const Matrix n = batchnorm_forward(a, model.norms[t], eps, mode, &cache.norms[t]);
    const Matrix r = relu(n);
    const Matrix& m = mask_for(t - 1, r, model.config.dropout, mode, rng, fixed_masks, cache);
    cache.streams.push_back(stream);
    stream += r.cwiseProduct(m);
    cache.layer_inputs.push_back(std::move(in));
    cache.pre_activations.push_back(std::move(a));
  }
  const auto& out = model.dense.back();
  cache.logits = dense_forward(out.weight, out.bias, stream);
  cache.streams.push_back(stream);
  cache.layer_inputs.push_back(std::move(stream));
  cache.probs = sigmoid(cache.logits);
  return cache;
}

Matrix predict(const Model& model, const Matrix& batch) {
  Rng unused(0);
  return forward(model, batch, Mode::Infer, unused).probs;
}

Gradients zero_gradients(const Model& model) {
  Gradients g;
  for (const auto& d : model.dense) {
    g.dense.push_back({Matrix::Zero(d.weight.rows(), d.weight.cols()),
                       Vector::Zero(d.bias.size())});
  }
  for (const auto& n : model.norms) {
    g.norms.push_back({Vector::Zero(n.scale.size()), Vector::Zero(n.shift.size()), {}, {}});
  }
  return g;
}

Gradients backward(const Model& model, const ForwardCache& cache, const Matrix& labels) {
  require(cache.mode == Mode::Train, ErrorKind::InvalidArgument,
          "backward needs a train-mode forward cache");
  require(cache.revision == model.revision && cache.architecture == model.config.architecture &&
              cache.layer_inputs.size() == model.dense.size(),
          ErrorKind::InvalidArgument, "stale forward cache: model changed since the forward pass");

  Gradients g = zero_gradients(model);
  const Matrix d_logits = logit_gradient(cache, labels);
  const std::size_t last = model.dense.size() - 1;
  Matrix d_h;
  dense_backward(model.dense[last], cache.layer_inputs[last], d_logits, g.dense[last], &d_h);

  if (model.config.architecture == Architecture::DFF) {
    for (std::size_t i = last; i-- > 0;) {
      const Matrix d_a = relu_gate(d_h.cwiseProduct(cache.masks[i]), cache.pre_activations[i]);
      Matrix d_in;
      dense_backward(model.dense[i], cache.layer_inputs[i], d_a, g.dense[i],
                     i > 0 ? &d_in : nullptr);
      d_h = std::move(d_in);
    }
    return g;
  }

  // d_h is the gradient w.r.t. the final stream S_T = z~ + sum_t zbar_t
  Matrix d_stream = std::move(d_h);
  for (std::size_t t = last - 1; t >= 1; --t) {
    const auto& bn = cache.norms[t];
    const Matrix d_n = relu_gate(d_stream.cwiseProduct(cache.masks[t - 1]), bn.output);
    const Matrix d_a = batchnorm_backward(model.norms[t], bn, d_n, g.norms[t]);
    Matrix d_in;
    dense_backward(model.dense[t], cache.layer_inputs[t], d_a, g.dense[t], &d_in);
    // the block read relu(S_{t-1}); S_{t-1} also feeds S_t directly
    d_stream += relu_gate(d_in, cache.streams[t - 1]);
  }
  const Matrix d_a0 = batchnorm_backward(model.norms[0], cache.norms[0], d_stream, g.norms[0]);
  dense_backward(model.dense[0], cache.layer_inputs[0], d_a0, g.dense[0], nullptr);
  return g;
}

void update_running_stats(Model& model, const ForwardCache& cache) {
  if (cache.mode != Mode::Train) return;
  require(cache.norms.size() == model.norms.size(), ErrorKind::InvalidArgument,
          "forward cache does not match the model's batch-norm layers");
  const double mom = model.config.batchnorm_momentum;
  for (std::size_t i = 0; i < model.norms.size(); ++i) {
    auto& n = model.norms[i];
    n.running_mean = mom * n.running_mean + (1.0 - mom) * cache.norms[i].mean;
    n.running_var = mom * n.running_var + (1.0 - mom) * cache.norms[i].var;
  }
}

namespace {

template <class Dense, class Norms>
std::vector<std::span<double>> views(Dense& dense, Norms& norms) {
  std::vector<std::span<double>> v;
  auto add = [&](auto& t) { v.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  for (auto& d : dense) {
    add(d.weight);
    add(d.bias);
  }
  for (auto& n : norms) {
    add(n.scale);
    add(n.shift);
  }
  return v;
}

}  // namespace

std::vector<std::span<double>> parameter_views(Model& model) {
  return views(model.dense, model.norms);
}

std::vector<std::span<double>> parameter_views(Gradients& grads) {
  return views(grads.dense, grads.norms);
}

void round_to_float(Model& model) {
  auto snap = [](auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = static_cast<double>(static_cast<float>(t.data()[i]));
    }
  };
  for (auto& d : model.dense) {
    snap(d.weight);
    snap(d.bias);
  }
  for (auto& n : model.norms) {
    snap(n.scale);
    snap(n.shift);
    snap(n.running_mean);
    snap(n.running_var);
  }
}

namespace {

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"architecture", to_string(c.architecture)},
          {"input_dim", c.input_dim},
          {"output_dim", c.output_dim},
          {"hidden_width", c.hidden_width},
          {"depth", c.depth},
          {"dropout", c.dropout},
          {"batchnorm_epsilon", c.batchnorm_epsilon},
          {"batchnorm_momentum", c.batchnorm_momentum}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
  c.input_dim = j.at("input_dim").get<int>();
  c.output_dim = j.at("output_dim").get<int>();
  c.hidden_width = j.at("hidden_width").get<int>();
  c.depth = j.at("depth").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.batchnorm_epsilon = j.at("batchnorm_epsilon").get<double>();
  c.batchnorm_momentum = j.at("batchnorm_momentum").get<double>();
  return c;
}

// Storage order: each dense layer (row-major weight, bias), then each
// batch-norm layer (scale, shift, running mean, running variance).
template <class Fn>
void for_each_stored(Model& model, Fn&& fn) {
  for (auto& d : model.dense) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = d.weight;
    fn(w);
    d.weight = w;
    fn(d.bias);
  }
  for (auto& n : model.norms) {
    fn(n.scale);
    fn(n.shift);
    fn(n.running_mean);
    fn(n.running_var);
  }
}

std::size_t stored_count(const Model& model) {
  std::size_t total = 0;
  for (const auto& d : model.dense) total += d.weight.size() + d.bias.size();
  for (const auto& n : model.norms) total += 4 * n.scale.size();
  return total;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::vector<float> payload;
  payload.reserve(stored_count(model));
  Model copy = model;
  for_each_stored(copy, [&](auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) payload.push_back(static_cast<float>(t.data()[i]));
  });

  nlohmann::json header = {{"format_version", kFormatVersion},
                           {"config", config_to_json(model.config)},
                           {"trained", model.trained},
                           {"parameter_count", payload.size()}};
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write model " + path);
  io::write_header(out, kMagic, header);
  io::write_f32(out, payload);
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing model " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open model " + path);
  const std::string what = "model " + path;
  const nlohmann::json header = io::read_header(in, kMagic, what);

  Model model;
  std::size_t declared = 0;
  try {
    require(header.at("format_version").get<int>() == kFormatVersion, ErrorKind::Format,
            what + ": unsupported format version");
    declared = header.at("parameter_count").get<std::size_t>();
    require(io::remaining_bytes(in) >= 4ULL * declared, ErrorKind::Format,
            what + ": truncated payload");
    model = init_model(config_from_json(header.at("config")), 0);
    model.trained = header.at("trained").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, what + ": malformed header: " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    fail(ErrorKind::Format, what + ": " + e.what());
  }
  require(declared == stored_count(model), ErrorKind::Format,
          what + ": parameter count does not match the declared architecture");

  std::vector<float> payload(declared);
  io::read_f32(in, payload, what);
  io::expect_eof(in, what);
  std::size_t k = 0;
  for_each_stored(model, [&](auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = payload[k++];
  });
  return model;
}

}  // namespace scma::nn
