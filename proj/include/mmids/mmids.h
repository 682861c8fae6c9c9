// Copyright 2026 The mmids Authors
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

#ifndef MMIDS_MMIDS_H
#define MMIDS_MMIDS_H

#include <stddef.h>
#include <stdint.h>

#if defined(MMIDS_BUILDING_LIBRARY)
#define MMIDS_API __attribute__((visibility("default")))
#else
#define MMIDS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum mmids_status {
  MMIDS_OK = 0,
  MMIDS_ERR_INTERNAL = 1,
  MMIDS_ERR_INPUT = 2,        /* bad usage, invalid config, missing or malformed input */
  MMIDS_ERR_NUMERICAL = 3,    /* training aborted on a non-finite loss */
  MMIDS_ERR_VERIFICATION = 4  /* gradient check above tolerance */
} mmids_status;

typedef enum mmids_log_level { MMIDS_LOG_INFO = 0, MMIDS_LOG_WARNING = 1 } mmids_log_level;

typedef struct mmids_config mmids_config;
typedef struct mmids_gradcheck mmids_gradcheck;
typedef struct mmids_ablation mmids_ablation;
typedef struct mmids_model mmids_model;

typedef struct mmids_metrics {
  uint64_t tp;
  uint64_t tn;
  uint64_t fp;
  uint64_t fn;
  double precision;
  double recall;
  double f1;
  double fp_rate_pct;
  double fn_rate_pct;
} mmids_metrics;

MMIDS_API const char* mmids_version(void);

/* Message of the last failed call on this thread; "" if none. */
MMIDS_API const char* mmids_last_error(void);

/* Receives library log lines. NULL restores the default (warnings to stderr). */
typedef void (*mmids_log_fn)(mmids_log_level level, const char* message, void* user_data);
MMIDS_API void mmids_set_log_callback(mmids_log_fn fn, void* user_data);

/* Run configuration. Relative paths inside the file resolve against its directory. */
MMIDS_API mmids_status mmids_config_load(const char* path, mmids_config** out);
MMIDS_API mmids_status mmids_config_parse(const char* json_text, const char* base_dir, mmids_config** out);
MMIDS_API void mmids_config_free(mmids_config* config);
/* Overrides the training seed and replaces the ablation and gradient-check seed lists with it. */
MMIDS_API mmids_status mmids_config_set_seed(mmids_config* config, uint64_t seed);
/* Overrides the synthetic generator seed. */
MMIDS_API mmids_status mmids_config_set_data_seed(mmids_config* config, uint64_t seed);
MMIDS_API mmids_status mmids_config_set_output_dir(mmids_config* config, const char* dir);

MMIDS_API mmids_status mmids_generate(const mmids_config* config, const char* out_dir);

/* final_loss may be NULL; it is NaN when zero epochs were run. */
MMIDS_API mmids_status mmids_train(const mmids_config* config, double* final_loss);

MMIDS_API mmids_status mmids_eval(const mmids_config* config, mmids_metrics* out);

/* Returns MMIDS_ERR_VERIFICATION with *out set when any group exceeds tolerance. */
MMIDS_API mmids_status mmids_gradcheck_run(const mmids_config* config, mmids_gradcheck** out);
MMIDS_API size_t mmids_gradcheck_group_count(const mmids_gradcheck* result);
MMIDS_API const char* mmids_gradcheck_group_name(const mmids_gradcheck* result, size_t index);
MMIDS_API double mmids_gradcheck_group_error(const mmids_gradcheck* result, size_t index);
MMIDS_API double mmids_gradcheck_tolerance(const mmids_gradcheck* result);
MMIDS_API int mmids_gradcheck_passed(const mmids_gradcheck* result);
MMIDS_API void mmids_gradcheck_free(mmids_gradcheck* result);

MMIDS_API mmids_status mmids_ablation_run(const mmids_config* config, mmids_ablation** out);
/* Rows are multi, sensor-only, network-only. */
MMIDS_API size_t mmids_ablation_row_count(const mmids_ablation* result);
MMIDS_API mmids_status mmids_ablation_row(const mmids_ablation* result, size_t index, const char** modality,
                                          double* precision, double* recall, double* f1);
/* The formatted table; owned by the result. */
MMIDS_API const char* mmids_ablation_table(const mmids_ablation* result);
MMIDS_API void mmids_ablation_free(mmids_ablation* result);

MMIDS_API mmids_status mmids_model_load(const char* checkpoint_path, mmids_model** out);
MMIDS_API void mmids_model_free(mmids_model* model);
MMIDS_API size_t mmids_model_sensor_inputs(const mmids_model* model);
MMIDS_API size_t mmids_model_network_inputs(const mmids_model* model);
MMIDS_API size_t mmids_model_window(const mmids_model* model);
MMIDS_API const char* mmids_model_modality(const mmids_model* model);

/*
 * Classifies one normalized sample. `network` is window x network_inputs,
 * row-major, oldest row first. probabilities receives (normal, attack);
 * either output may be NULL.
 */
MMIDS_API mmids_status mmids_model_predict(const mmids_model* model, const double* sensor, size_t sensor_len,
                                           const double* network, size_t network_rows, size_t network_cols,
                                           double probabilities[2], int* label);

#ifdef __cplusplus
}
#endif

#endif
