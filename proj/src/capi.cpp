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

#include "scma/scma_aud.h"

#include <exception>
#include <new>
#include <string>

#include "scma/baselines.hpp"
#include "scma/error.hpp"
#include "scma/harness.hpp"
#include "scma/nn.hpp"

struct scma_system_s {
  scma::System system;
};

struct scma_model_s {
  scma::nn::Model model;
};

namespace {

thread_local std::string last_error;

scma_status status_of(scma::ErrorKind kind) {
  switch (kind) {
    case scma::ErrorKind::InvalidArgument:
    case scma::ErrorKind::DimensionMismatch: return SCMA_ERR_INVALID_ARGUMENT;
    case scma::ErrorKind::Config: return SCMA_ERR_CONFIG;
    case scma::ErrorKind::Io: return SCMA_ERR_IO;
    case scma::ErrorKind::Format: return SCMA_ERR_FORMAT;
    case scma::ErrorKind::Stage: return SCMA_ERR_STAGE;
  }
  return SCMA_ERR_INTERNAL;
}

template <class Fn>
scma_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SCMA_OK;
  } catch (const scma::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SCMA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SCMA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  scma::require(p != nullptr, scma::ErrorKind::InvalidArgument,
                std::string(name) + " must not be null");
}

scma::CVector read_complex(const double* interleaved, int n) {
  scma::CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {interleaved[2 * i], interleaved[2 * i + 1]};
  return v;
}

void write_support(const std::vector<std::uint8_t>& s, uint8_t* out) {
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i];
}

}  // namespace

extern "C" {

const char* scma_version(void) { return "1.0.0"; }

const char* scma_last_error(void) { return last_error.c_str(); }

void scma_run_options_init(scma_run_options* options) {
  if (!options) return;
  *options = scma_run_options{0, 0, nullptr, 1, 0, 1};
}

scma_status scma_system_create(int resources, int devices, int nonzeros, uint64_t pilot_seed,
                               const char* codebook_path, scma_system_t** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    scma::SystemConfig cfg;
    cfg.resources = resources;
    cfg.devices = devices;
    cfg.nonzeros = nonzeros;
    cfg.pilot_seed = pilot_seed;
    if (codebook_path) cfg.codebook_path = codebook_path;
    *out = new scma_system_s{scma::build_system(cfg)};
  });
}

void scma_system_destroy(scma_system_t* system) { delete system; }

scma_status scma_system_dims(const scma_system_t* system, int* resources, int* devices) {
  return guarded([&] {
    need(system, "system");
    if (resources) *resources = system->system.phi.resources();
    if (devices) *devices = system->system.phi.devices();
  });
}

scma_status scma_system_phi(const scma_system_t* system, double* out, size_t len) {
  return guarded([&] {
    need(system, "system");
    need(out, "out");
    const auto& phi = system->system.phi.phi;
    scma::require(len >= static_cast<size_t>(2 * phi.size()), scma::ErrorKind::InvalidArgument,
                  "output buffer too small for Phi");
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      out[2 * i] = phi.data()[i].real();
      out[2 * i + 1] = phi.data()[i].imag();
    }
  });
}

scma_status scma_noise_variance(const scma_system_t* system, double snr_db, int active,
                                double* out) {
  return guarded([&] {
    need(system, "system");
    need(out, "out");
    *out = scma::snr_to_noise_variance(snr_db, system->system.phi, active);
  });
}

scma_status scma_sample_frame(const scma_system_t* system, int active, double snr_db,
                              uint64_t seed, double* received, uint8_t* activity) {
  return guarded([&] {
    need(system, "system");
    need(received, "received");
    need(activity, "activity");
    scma::Rng rng(seed);
    const scma::Frame f = scma::sample_frame(system->system.phi, active, snr_db, rng);
    for (Eigen::Index l = 0; l < f.received.size(); ++l) {
      received[2 * l] = f.received(l).real();
      received[2 * l + 1] = f.received(l).imag();
    }
    write_support(f.activity, activity);
  });
}

scma_status scma_stack_real_imag(const double* received, int resources, double* out) {
  return guarded([&] {
    need(received, "received");
    need(out, "out");
    scma::require(resources >= 0, scma::ErrorKind::InvalidArgument, "negative length");
    const Eigen::VectorXd v = scma::stack_real_imag(read_complex(received, resources));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  });
}

scma_status scma_ls_bomp(const scma_system_t* system, const double* received, int active,
                         uint8_t* support) {
  return guarded([&] {
    need(system, "system");
    need(received, "received");
    need(support, "support");
    const auto& phi = system->system.phi;
    const auto r = scma::ls_bomp(phi, read_complex(received, phi.resources()),
                                 scma::BompConfig{active, {}});
    write_support(r.support, support);
  });
}

scma_status scma_c_amp(const scma_system_t* system, const double* received, double theta,
                       int max_iters, uint8_t* support, int* diverged) {
  return guarded([&] {
    need(system, "system");
    need(received, "received");
    need(support, "support");
    const auto& phi = system->system.phi;
    scma::AmpConfig cfg;
    cfg.theta = theta;
    cfg.max_iters = max_iters;
    const auto r = scma::c_amp(phi, read_complex(received, phi.resources()), cfg);
    write_support(r.support, support);
    if (diverged) *diverged = r.diverged ? 1 : 0;
  });
}

scma_status scma_exhaustive_oracle(const scma_system_t* system, const double* received,
                                   int active, uint8_t* support) {
  return guarded([&] {
    need(system, "system");
    need(received, "received");
    need(support, "support");
    const auto& phi = system->system.phi;
    write_support(scma::exhaustive_oracle(phi, read_complex(received, phi.resources()), active).support,
                  support);
  });
}

scma_status scma_model_load(const char* path, scma_model_t** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new scma_model_s{scma::nn::load_model(path)};
  });
}

void scma_model_destroy(scma_model_t* model) { delete model; }

scma_status scma_model_dims(const scma_model_t* model, int* input_dim, int* output_dim) {
  return guarded([&] {
    need(model, "model");
    if (input_dim) *input_dim = model->model.config.input_dim;
    if (output_dim) *output_dim = model->model.config.output_dim;
  });
}

scma_status scma_model_predict(const scma_model_t* model, const double* inputs, size_t count,
                               double* probs) {
  return guarded([&] {
    need(model, "model");
    need(inputs, "inputs");
    need(probs, "probs");
    scma::require(count >= 1, scma::ErrorKind::InvalidArgument, "count must be positive");
    const auto& cfg = model->model.config;
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>> x(
        inputs, cfg.input_dim, static_cast<Eigen::Index>(count));
    const Eigen::MatrixXd p = scma::nn::predict(model->model, x);
    // column-major N x count is row-major count x N
    std::copy(p.data(), p.data() + p.size(), probs);
  });
}

scma_status scma_select_support(const double* probs, int devices, scma_policy policy, int active,
                                double threshold, uint8_t* support) {
  return guarded([&] {
    need(probs, "probs");
    need(support, "support");
    scma::require(devices >= 1, scma::ErrorKind::InvalidArgument, "devices must be positive");
    const auto sel = policy == SCMA_POLICY_TOP_M ? scma::nn::SelectionPolicy::top_m(active)
                                                 : scma::nn::SelectionPolicy::above(threshold);
    write_support(scma::nn::select_support({probs, static_cast<size_t>(devices)}, sel), support);
  });
}

scma_status scma_run(const char* config_path, scma_stage stage, const scma_run_options* options) {
  return guarded([&] {
    need(config_path, "config_path");
    scma::RunOptions opt;
    if (options) {
      if (options->has_seed) opt.seed = options->seed;
      if (options->out_dir) opt.out_dir = options->out_dir;
      opt.threads = options->threads > 0 ? options->threads : 1;
      opt.use_cache = options->no_cache == 0;
      opt.verbose = options->verbose != 0;
    }
    scma::Stage s = scma::Stage::Sweep;
    switch (stage) {
      case SCMA_STAGE_GEN_DATA: s = scma::Stage::GenData; break;
      case SCMA_STAGE_TRAIN: s = scma::Stage::Train; break;
      case SCMA_STAGE_SWEEP: s = scma::Stage::Sweep; break;
      default: scma::fail(scma::ErrorKind::InvalidArgument, "unknown stage");
    }
    // load errors are config errors; anything after that is a stage failure
    const scma::ExperimentConfig cfg = scma::load_config(config_path);
    try {
      scma::run_experiment(cfg, s, opt);
    } catch (const scma::Error& e) {
      if (e.kind() == scma::ErrorKind::Config) throw;
      throw scma::Error(scma::ErrorKind::Stage, e.what());
    }
  });
}

scma_status scma_plot_data(const char* out_dir, const char* figure) {
  return guarded([&] {
    need(out_dir, "out_dir");
    std::optional<scma::FigureId> only;
    if (figure) only = scma::figure_from_string(figure);
    scma::emit_all_plot_data(out_dir, only);
  });
}

scma_status scma_oracle_check(const char* config_path, int active, size_t frames, uint64_t seed,
                              size_t* oracle_exact, size_t* bomp_agrees) {
  return guarded([&] {
    need(config_path, "config_path");
    const auto cfg = scma::load_config(config_path);
    const auto sys = scma::build_system(cfg.system);
    const auto r = scma::oracle_check(sys.phi, active, frames, seed);
    if (oracle_exact) *oracle_exact = r.oracle_exact;
    if (bomp_agrees) *bomp_agrees = r.bomp_agrees;
  });
}

scma_status scma_tune_amp(const char* config_path, const double* thetas, size_t count,
                          size_t frames, uint64_t seed, double* mean_f1) {
  return guarded([&] {
    need(config_path, "config_path");
    need(thetas, "thetas");
    need(mean_f1, "mean_f1");
    const auto cfg = scma::load_config(config_path);
    const auto sys = scma::build_system(cfg.system);
    const auto points = scma::tune_amp_theta(sys.phi, cfg.amp, {thetas, count}, cfg.sweep.m,
                                             cfg.sweep.snr_db, frames, seed);
    for (size_t i = 0; i < points.size(); ++i) mean_f1[i] = points[i].mean_f1;
  });
}

}  // extern "C"
