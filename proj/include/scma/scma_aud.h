/*
 * Copyright 2026 The SCMA-AUD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the SCMA active-user-detection library.
 *
 * Every function returns a scma_status; on failure scma_last_error() holds a
 * message for the calling thread. Handles are opaque and owned by the
 * caller, who releases them with the matching *_destroy function.
 *
 * Complex vectors cross the boundary as interleaved doubles
 * (re0, im0, re1, im1, ...).
 */
#ifndef SCMA_AUD_H_
#define SCMA_AUD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SCMA_API __declspec(dllexport)
#else
#define SCMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scma_status {
  SCMA_OK = 0,
  SCMA_ERR_INVALID_ARGUMENT = 1,
  SCMA_ERR_CONFIG = 2,
  SCMA_ERR_STAGE = 3,
  SCMA_ERR_IO = 4,
  SCMA_ERR_FORMAT = 5,
  SCMA_ERR_INTERNAL = 6
} scma_status;

typedef enum scma_stage {
  SCMA_STAGE_GEN_DATA = 0,
  SCMA_STAGE_TRAIN = 1,
  SCMA_STAGE_SWEEP = 2
} scma_stage;

typedef enum scma_policy {
  SCMA_POLICY_TOP_M = 0,
  SCMA_POLICY_THRESHOLD = 1
} scma_policy;

typedef struct scma_system_s scma_system_t;
typedef struct scma_model_s scma_model_t;

typedef struct scma_run_options {
  uint64_t seed;
  int has_seed;        /* nonzero: override data.seed */
  const char* out_dir; /* NULL: use output_dir from the config */
  int threads;         /* <= 0 means 1 */
  int no_cache;
  int verbose;
} scma_run_options;

SCMA_API const char* scma_version(void);
SCMA_API const char* scma_last_error(void);
SCMA_API void scma_run_options_init(scma_run_options* options);

/* --- system: codebook, pilots and measurement matrix --------------------- */

/* codebook_path may be NULL for the built-in phase-rotation codebook. */
SCMA_API scma_status scma_system_create(int resources, int devices, int nonzeros,
                                        uint64_t pilot_seed, const char* codebook_path,
                                        scma_system_t** out);
SCMA_API void scma_system_destroy(scma_system_t* system);
SCMA_API scma_status scma_system_dims(const scma_system_t* system, int* resources,
                                      int* devices);
/* Writes Phi column-major, interleaved; `len` must be at least 2 * L * N. */
SCMA_API scma_status scma_system_phi(const scma_system_t* system, double* out, size_t len);
SCMA_API scma_status scma_noise_variance(const scma_system_t* system, double snr_db,
                                         int active, double* out);
/* received: 2 * L doubles; activity: N bytes. */
SCMA_API scma_status scma_sample_frame(const scma_system_t* system, int active,
                                       double snr_db, uint64_t seed, double* received,
                                       uint8_t* activity);

/* received (2 * L interleaved) -> out (2 * L): real parts then imaginary parts. */
SCMA_API scma_status scma_stack_real_imag(const double* received, int resources, double* out);

/* --- baseline solvers (support: N bytes) --------------------------------- */

SCMA_API scma_status scma_ls_bomp(const scma_system_t* system, const double* received,
                                  int active, uint8_t* support);
SCMA_API scma_status scma_c_amp(const scma_system_t* system, const double* received,
                                double theta, int max_iters, uint8_t* support,
                                int* diverged);
SCMA_API scma_status scma_exhaustive_oracle(const scma_system_t* system,
                                            const double* received, int active,
                                            uint8_t* support);

/* --- trained detectors ---------------------------------------------------- */

SCMA_API scma_status scma_model_load(const char* path, scma_model_t** out);
SCMA_API void scma_model_destroy(scma_model_t* model);
SCMA_API scma_status scma_model_dims(const scma_model_t* model, int* input_dim,
                                     int* output_dim);
/* inputs: count x input_dim row-major; probs: count x output_dim row-major. */
SCMA_API scma_status scma_model_predict(const scma_model_t* model, const double* inputs,
                                        size_t count, double* probs);
SCMA_API scma_status scma_select_support(const double* probs, int devices,
                                         scma_policy policy, int active, double threshold,
                                         uint8_t* support);

/* --- experiment pipeline --------------------------------------------------- */

SCMA_API scma_status scma_run(const char* config_path, scma_stage stage,
                              const scma_run_options* options);
/* figure may be NULL to emit every figure the sweep covers. */
SCMA_API scma_status scma_plot_data(const char* out_dir, const char* figure);
SCMA_API scma_status scma_oracle_check(const char* config_path, int active, size_t frames,
                                       uint64_t seed, size_t* oracle_exact,
                                       size_t* bomp_agrees);
/* mean_f1 receives one value per theta. */
SCMA_API scma_status scma_tune_amp(const char* config_path, const double* thetas,
                                   size_t count, size_t frames, uint64_t seed,
                                   double* mean_f1);

#ifdef __cplusplus
}
#endif

#endif  /* SCMA_AUD_H_ */
