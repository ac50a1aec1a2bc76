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

#include <Eigen/Dense>

#include "scma/datagen.hpp"
#include "scma/rng.hpp"

namespace scma::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Batches are feature-major throughout: one column per sample.

enum class Architecture { DFF, ResNet };
enum class Mode { Train, Infer };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Output = scale * normalized + shift.
struct BatchNormLayer {
  Vector scale;
  Vector shift;
  Vector running_mean;
  Vector running_var;
};

struct ModelConfig {
  Architecture architecture = Architecture::DFF;
  int input_dim = 8;      // 2L
  int output_dim = 6;     // N
  int hidden_width = 256;
  // DFF: number of weight-bearing FC layers, input and output included.
  // ResNet: number of residual blocks.
  int depth = 12;
  double dropout = 0.1;
  double batchnorm_epsilon = 1e-3;
  double batchnorm_momentum = 0.99;

  static ModelConfig dff(int resources, int devices);
  static ModelConfig resnet(int resources, int devices);
  void validate() const;
};

struct Model {
  ModelConfig config;
  std::vector<DenseLayer> dense;
  std::vector<BatchNormLayer> norms;
  bool trained = false;
  // Bumped on every parameter update; forward caches record it.
  std::uint64_t revision = 0;
};

// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases,
// unit BN scale, zero BN shift.
Model init_model(const ModelConfig& config, std::uint64_t seed);

// --- layer primitives -------------------------------------------------------

Vector dense_forward(const Matrix& weight, const Vector& bias, const Vector& x);
Matrix dense_forward(const Matrix& weight, const Vector& bias, const Matrix& batch);

struct BatchNormCache {
  Matrix normalized;
  Matrix output;
  Vector mean;
  Vector var;
  Vector inv_std;
};

// Train mode standardizes each feature row with its batch mean and
// population variance; infer mode uses the running statistics.
Matrix batchnorm_forward(const Matrix& batch, const BatchNormLayer& layer,
                         double epsilon, Mode mode, BatchNormCache* cache = nullptr);

Matrix relu(const Matrix& x);
double sigmoid(double z);
Matrix sigmoid(const Matrix& z);

// Inverted dropout: survivors are scaled by 1 / (1 - p). When `mask` is
// given it receives the scaled mask that was applied.
Matrix dropout(const Matrix& x, double p, Mode mode, Rng& rng, Matrix* mask = nullptr);

inline constexpr double kProbabilityClamp = 1e-7;

// Mean over all entries of the binary cross-entropy, probabilities clamped
// to [1e-7, 1 - 1e-7].
double bce_loss(const Matrix& probs, const Matrix& labels);

// --- whole-network passes ---------------------------------------------------

struct ForwardCache {
  Mode mode = Mode::Infer;
  std::uint64_t revision = 0;
  Architecture architecture = Architecture::DFF;
  std::vector<Matrix> layer_inputs;  // input of every dense layer
  std::vector<Matrix> pre_activations;
  std::vector<BatchNormCache> norms;
  std::vector<Matrix> masks;
  std::vector<Matrix> streams;  // ResNet: z~ + sum of block outputs so far
  Matrix logits;
  Matrix probs;
};

// Optional fixed dropout masks, one per dropout site, replacing fresh draws.
using DropoutMasks = std::vector<Matrix>;

ForwardCache forward(const Model& model, const Matrix& batch, Mode mode, Rng& rng,
                     const DropoutMasks* fixed_masks = nullptr);
ForwardCache forward_dff(const Model& model, const Matrix& batch, Mode mode, Rng& rng,
                         const DropoutMasks* fixed_masks = nullptr);
ForwardCache forward_resnet(const Model& model, const Matrix& batch, Mode mode,
                            Rng& rng, const DropoutMasks* fixed_masks = nullptr);

// Inference probabilities (N x Q).
Matrix predict(const Model& model, const Matrix& batch);

struct Gradients {
  std::vector<DenseLayer> dense;
  std::vector<BatchNormLayer> norms;  // only scale and shift are filled
};

Gradients zero_gradients(const Model& model);

// Exact gradients of bce_loss(cache.probs, labels) w.r.t. every trainable
// parameter.
Gradients backward(const Model& model, const ForwardCache& cache, const Matrix& labels);

// Folds the batch statistics recorded in `cache` into the running averages.
void update_running_stats(Model& model, const ForwardCache& cache);

// Trainable tensors in declared order: every dense weight and bias, then
// every batch-norm scale and shift.
std::vector<std::span<double>> parameter_views(Model& model);
std::vector<std::span<double>> parameter_views(Gradients& grads);

// Rounds every stored value (including running statistics) to float32.
void round_to_float(Model& model);

// --- optimisation -----------------------------------------------------------

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 1000;
  int epochs = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<Vector> first;
  std::vector<Vector> second;
  std::int64_t step = 0;
};

void adam_step(Model& model, Gradients& grads, AdamState& state, const TrainConfig& config);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  std::optional<double> val_pd;
  std::optional<double> val_ppv;
  std::optional<double> val_auc;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  // Set when the final training loss exceeds the first epoch's.
  bool loss_increased = false;
};

Matrix dataset_inputs(const Dataset& data);
Matrix dataset_labels(const Dataset& data);

// Mini-batch Adam on BCE with per-epoch seeded shuffling. The model is left
// holding the parameters of the best validation-loss epoch, rounded to
// float32 so that a save/load round trip is exact.
TrainHistory train(Model& model, const Dataset& train_set, const Dataset& val_set,
                   const TrainConfig& config);

std::string history_csv(const TrainHistory& history);

// --- support selection ------------------------------------------------------

struct SelectionPolicy {
  enum class Kind { TopM, Threshold };
  Kind kind = Kind::TopM;
  int m = 1;
  double threshold = 0.5;

  static SelectionPolicy top_m(int m) { return {Kind::TopM, m, 0.5}; }
  static SelectionPolicy above(double tau) { return {Kind::Threshold, 0, tau}; }
};

// top_m: the m largest probabilities, lowest index on ties.
// threshold: every index with p > tau.
std::vector<std::uint8_t> select_support(std::span<const double> probs,
                                         const SelectionPolicy& policy);

// "SCMA-AUD-NN1" magic line, JSON config line, float32 payload.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace scma::nn
