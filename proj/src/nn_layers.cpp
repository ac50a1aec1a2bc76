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

#include "scma/error.hpp"
#include "scma/nn.hpp"

namespace scma::nn {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Vector dense_forward(const Matrix& weight, const Vector& bias, const Vector& x) {
  require(weight.cols() == x.size() && weight.rows() == bias.size(),
          ErrorKind::DimensionMismatch,
          "dense layer " + shape(weight) + " applied to input of length " +
              std::to_string(x.size()));
  return weight * x + bias;
}

Matrix dense_forward(const Matrix& weight, const Vector& bias, const Matrix& batch) {
  require(weight.cols() == batch.rows() && weight.rows() == bias.size(),
          ErrorKind::DimensionMismatch,
          "dense layer " + shape(weight) + " applied to batch " + shape(batch));
  Matrix out(weight.rows(), batch.cols());
  out.noalias() = weight * batch;
  out.colwise() += bias;
  return out;
}

Matrix batchnorm_forward(const Matrix& batch, const BatchNormLayer& layer,
                         double epsilon, Mode mode, BatchNormCache* cache) {
  const auto features = batch.rows();
  const auto q = batch.cols();
  require(layer.scale.size() == features && layer.shift.size() == features,
          ErrorKind::DimensionMismatch, "batch-norm width does not match batch " + shape(batch));

  Vector mean;
  Vector var;
  if (mode == Mode::Train) {
    require(q >= 2, ErrorKind::InvalidArgument,
            "batch normalization in train mode needs at least 2 samples");
    mean = batch.rowwise().mean();
    var = (batch.colwise() - mean).array().square().rowwise().mean();
  } else {
    mean = layer.running_mean;
    var = layer.running_var;
  }
  // a zero-variance feature with epsilon == 0 normalizes to 0
  Vector inv_std = (var.array() + epsilon)
                       .unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; })
                       .matrix();

  Matrix normalized = (batch.colwise() - mean).array().colwise() * inv_std.array();
  Matrix out = (normalized.array().colwise() * layer.scale.array()).colwise() +
               layer.shift.array();
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->output = out;
    cache->mean = std::move(mean);
    cache->var = std::move(var);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Matrix dropout(const Matrix& x, double p, Mode mode, Rng& rng, Matrix* mask) {
  require(p >= 0.0 && p < 1.0, ErrorKind::InvalidArgument,
          "dropout probability must lie in [0, 1)");
  if (mode == Mode::Infer || p == 0.0) {
    if (mask) *mask = Matrix::Ones(x.rows(), x.cols());
    return x;
  }
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix m(x.rows(), x.cols());
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    data[i] = u < p ? 0.0 : keep_scale;
  }
  Matrix out = x.cwiseProduct(m);
  if (mask) *mask = std::move(m);
  return out;
}

double bce_loss(const Matrix& probs, const Matrix& labels) {
  require(probs.rows() == labels.rows() && probs.cols() == labels.cols(),
          ErrorKind::DimensionMismatch,
          "BCE shapes differ: " + shape(probs) + " vs " + shape(labels));
  require(probs.size() > 0, ErrorKind::InvalidArgument, "BCE of an empty batch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs.data()[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = labels.data()[i];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

}  // namespace scma::nn
