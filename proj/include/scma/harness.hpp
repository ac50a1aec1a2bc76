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

#include <nlohmann/json_fwd.hpp>

#include "scma/baselines.hpp"
#include "scma/datagen.hpp"
#include "scma/metrics.hpp"
#include "scma/nn.hpp"
#include "scma/signal.hpp"

namespace scma {

struct SystemConfig {
  int resources = 4;  // L
  int devices = 6;    // N
  int nonzeros = 2;   // J
  std::optional<std::string> codebook_path;
  std::uint64_t pilot_seed = 1;
};

struct DataConfig {
  std::size_t train_count = 800000;
  std::size_t val_count = 100000;
  std::size_t test_count = 100000;
  // Unset: one fixed-m corpus (and model) per swept m.
  std::optional<int> m_train;
  SnrSpec snr_train = SnrSpec::range(0.0, 30.0);
  std::uint64_t seed = 1;
};

struct SweepConfig {
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30};
  std::vector<int> m = {1};
  std::size_t frames_per_point = 10000;
};

struct ExperimentConfig {
  SystemConfig system;
  DataConfig data;
  nn::ModelConfig dff = nn::ModelConfig::dff(4, 6);
  nn::ModelConfig resnet = nn::ModelConfig::resnet(4, 6);
  nn::TrainConfig train;
  AmpConfig amp;
  SweepConfig sweep;
  std::vector<std::string> methods = {"dff", "resnet", "ls_bomp", "c_amp"};
  std::string output_dir = "out";
};

// Throws Error(Config) naming the offending JSON path; unknown keys are
// rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct System {
  Codebook codebook;
  PilotAssignment pilots;
  MeasurementMatrix phi;
};

System build_system(const SystemConfig& config);

// --- evaluation -------------------------------------------------------------

enum class MethodKind { Dff, ResNet, LsBomp, CAmp, Genie };

struct Method {
  MethodKind kind = MethodKind::LsBomp;
  const nn::Model* model = nullptr;  // DNN methods only
  AmpConfig amp;

  std::string display_name() const;
};

MethodKind method_kind_from_string(const std::string& s);

struct Detection {
  std::vector<std::uint8_t> support;
  std::vector<double> scores;
};

// Runs one method on every frame. DNN methods and LS-BOMP use `policy`
// (LS-BOMP always receives the true m); C-AMP reports its own nonzeros.
// Scores feeding the AUC are the DNN probabilities or |g_hat| for the
// solvers.
MetricRow evaluate_method(const Method& method, const MeasurementMatrix& phi,
                          std::span<const Frame> frames, const nn::SelectionPolicy& policy,
                          double snr_db, int m);

std::vector<Frame> sample_test_frames(const MeasurementMatrix& phi, int m, double snr_db,
                                      std::size_t count, std::uint64_t seed);

// --- plot data --------------------------------------------------------------

enum class FigureId { PdVsSnr, PpvVsSnr, PdVsM, PmVsM };

std::string to_string(FigureId id);
FigureId figure_from_string(const std::string& s);
inline constexpr FigureId kAllFigures[] = {FigureId::PdVsSnr, FigureId::PpvVsSnr,
                                           FigureId::PdVsM, FigureId::PmVsM};

// Builds plot data from results.csv text: a metadata header section followed
// by one x/y series per (method, fixed axis value), methods in lexicographic
// order. Throws when the sweep does not cover the figure's x axis.
std::string plot_data(const std::string& results_csv, FigureId id);
void emit_plot_data(const std::string& results_csv, FigureId id, const std::string& path);

// --- pipeline ---------------------------------------------------------------

enum class Stage { GenData, Train, Sweep };

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
  bool use_cache = true;
  bool verbose = true;
};

struct RunReport {
  std::vector<std::string> cache_hits;
  std::vector<std::string> written_files;
  std::vector<MetricRow> rows;
};

// Generates corpora, trains models and sweeps, up to and including `stage`.
// Datasets and models are cached under <out>/cache by a hash of every input
// that affects them.
RunReport run_experiment(const ExperimentConfig& config, Stage stage, const RunOptions& options);
RunReport run_experiment(const std::string& config_path, Stage stage, const RunOptions& options);

// Regenerates every covered fig_<id>.dat from <out_dir>/results.csv.
std::vector<std::string> emit_all_plot_data(const std::string& out_dir,
                                            std::optional<FigureId> only = std::nullopt);

// --- self checks ------------------------------------------------------------

struct OracleCheckReport {
  int m = 0;
  std::size_t frames = 0;
  std::size_t oracle_exact = 0;      // oracle support == true support
  std::size_t bomp_agrees = 0;       // ls_bomp support == oracle support
  std::size_t bomp_exact = 0;
};

// Noiseless frames: identifiability of the codebook under the brute-force
// oracle and LS-BOMP agreement with it.
OracleCheckReport oracle_check(const MeasurementMatrix& phi, int m, std::size_t frames,
                               std::uint64_t seed);

struct AmpTuningPoint {
  double theta = 0.0;
  double mean_f1 = 0.0;
};

// Grid search of the C-AMP threshold multiplier on fresh validation frames,
// maximizing the mean standard F1 over the given (m, SNR) grid.
std::vector<AmpTuningPoint> tune_amp_theta(const MeasurementMatrix& phi, const AmpConfig& base,
                                           std::span<const double> thetas,
                                           std::span<const int> ms,
                                           std::span<const double> snrs, std::size_t frames,
                                           std::uint64_t seed);

}  // namespace scma
