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

// Command-line driver. Talks to the library only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scma/scma_aud.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

int exit_code(scma_status s) {
  if (s == SCMA_OK) return kExitOk;
  std::fprintf(stderr, "scma-aud: %s\n", scma_last_error());
  return s == SCMA_ERR_CONFIG ? kExitConfig : kExitStage;
}

struct CommonFlags {
  std::string config;
  long long seed = 0;
  std::string out;
  int threads = 1;
  bool no_cache = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Override data.seed");
  cmd->add_option("--out", f.out, "Override output_dir");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-cache", f.no_cache, "Ignore cached datasets and models");
  cmd->add_flag("--quiet", f.quiet, "Suppress progress logging");
}

int run_stage(const CommonFlags& f, const CLI::App* cmd, scma_stage stage) {
  scma_run_options opt;
  scma_run_options_init(&opt);
  if (cmd->count("--seed") > 0) {
    opt.has_seed = 1;
    opt.seed = static_cast<uint64_t>(f.seed);
  }
  if (!f.out.empty()) opt.out_dir = f.out.c_str();
  opt.threads = f.threads;
  opt.no_cache = f.no_cache ? 1 : 0;
  opt.verbose = f.quiet ? 0 : 1;
  return exit_code(scma_run(f.config.c_str(), stage, &opt));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grant-free SCMA active-user-detection workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scma_version());

  CommonFlags gen_flags, train_flags, sweep_flags;
  auto* gen = app.add_subcommand("gen-data", "Generate (or reuse cached) training corpora");
  add_common(gen, gen_flags);
  auto* train = app.add_subcommand("train", "Generate corpora and train the DNN detectors");
  add_common(train, train_flags);
  auto* sweep = app.add_subcommand("sweep", "Full pipeline: data, training, SNR/m sweep");
  add_common(sweep, sweep_flags);

  std::string plot_out;
  std::string plot_figure;
  auto* plot = app.add_subcommand("plot-data", "Write fig_<id>.dat files from results.csv");
  plot->add_option("--out", plot_out, "Directory holding results.csv")->required();
  plot->add_option("--figure", plot_figure, "pd_vs_snr | ppv_vs_snr | pd_vs_m | pm_vs_m");

  std::string oracle_config;
  std::vector<int> oracle_ms = {1, 2};
  std::size_t oracle_frames = 10000;
  long long oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle-check",
                                    "Noiseless identifiability and LS-BOMP agreement check");
  oracle->add_option("--config", oracle_config, "Experiment config (JSON)")->required();
  oracle->add_option("--m", oracle_ms, "Active-device counts");
  oracle->add_option("--frames", oracle_frames, "Frames per m");
  oracle->add_option("--seed", oracle_seed, "Random seed");

  std::string tune_config;
  std::vector<double> thetas = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
  std::size_t tune_frames = 2000;
  long long tune_seed = 7;
  auto* tune = app.add_subcommand("tune-amp",
                                  "Grid-search the C-AMP threshold multiplier on validation frames");
  tune->add_option("--config", tune_config, "Experiment config (JSON); uses its sweep grid")
      ->required();
  tune->add_option("--theta", thetas, "Candidate multipliers");
  tune->add_option("--frames", tune_frames, "Frames per grid point");
  tune->add_option("--seed", tune_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*gen) return run_stage(gen_flags, gen, SCMA_STAGE_GEN_DATA);
  if (*train) return run_stage(train_flags, train, SCMA_STAGE_TRAIN);
  if (*sweep) return run_stage(sweep_flags, sweep, SCMA_STAGE_SWEEP);
  if (*plot) {
    return exit_code(scma_plot_data(plot_out.c_str(),
                                    plot_figure.empty() ? nullptr : plot_figure.c_str()));
  }
  if (*oracle) {
    std::printf("m,frames,oracle_exact_rate,bomp_oracle_agreement\n");
    for (int m : oracle_ms) {
      std::size_t exact = 0, agree = 0;
      const scma_status s = scma_oracle_check(oracle_config.c_str(), m, oracle_frames,
                                              static_cast<uint64_t>(oracle_seed), &exact, &agree);
      if (s != SCMA_OK) return exit_code(s);
      std::printf("%d,%zu,%.6f,%.6f\n", m, oracle_frames,
                  static_cast<double>(exact) / static_cast<double>(oracle_frames),
                  static_cast<double>(agree) / static_cast<double>(oracle_frames));
    }
    return kExitOk;
  }
  if (*tune) {
    std::vector<double> f1(thetas.size());
    const scma_status s = scma_tune_amp(tune_config.c_str(), thetas.data(), thetas.size(),
                                        tune_frames, static_cast<uint64_t>(tune_seed), f1.data());
    if (s != SCMA_OK) return exit_code(s);
    std::size_t best = 0;
    std::printf("theta,mean_f1_standard\n");
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      std::printf("%g,%.6f\n", thetas[i], f1[i]);
      if (f1[i] > f1[best]) best = i;
    }
    std::fprintf(stderr, "best theta: %g\n", thetas[best]);
    return kExitOk;
  }
  return kExitConfig;
}
