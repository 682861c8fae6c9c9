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

#include "mmids/mmids.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "mmids/checkpoint.hpp"
#include "mmids/commands.hpp"
#include "mmids/error.hpp"
#include "mmids/log.hpp"
#include "mmids/run_config.hpp"

struct mmids_config {
  mmids::RunConfig config;
};

struct mmids_gradcheck {
  mmids::GradCheckResult result;
};

struct mmids_ablation {
  mmids::AblationResult result;
  std::vector<std::string> names;
  std::string table;
};

struct mmids_model {
  mmids::Checkpoint checkpoint;
  std::string modality;
};

namespace {

thread_local std::string last_error;

mmids_status fail(mmids_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
mmids_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const mmids::NumericalError& e) {
    return fail(MMIDS_ERR_NUMERICAL, e.what());
  } catch (const mmids::InvalidArgument& e) {
    return fail(MMIDS_ERR_INPUT, e.what());
  } catch (const mmids::DataError& e) {
    return fail(MMIDS_ERR_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MMIDS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MMIDS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MMIDS_ERR_INTERNAL, "unknown error");
  }
}

mmids_status null_argument(const char* what) {
  return fail(MMIDS_ERR_INPUT, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* mmids_version(void) { return MMIDS_VERSION; }

const char* mmids_last_error(void) { return last_error.c_str(); }

void mmids_set_log_callback(mmids_log_fn fn, void* user_data) {
  if (!fn) {
    mmids::set_log_sink({});
    return;
  }
  mmids::set_log_sink([fn, user_data](mmids::LogLevel level, std::string_view message) {
    const std::string text(message);
    fn(level == mmids::LogLevel::warning ? MMIDS_LOG_WARNING : MMIDS_LOG_INFO, text.c_str(), user_data);
  });
}

mmids_status mmids_config_load(const char* path, mmids_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mmids_config{mmids::load_run_config(path)};
    return MMIDS_OK;
  });
}

mmids_status mmids_config_parse(const char* json_text, const char* base_dir, mmids_config** out) {
  if (!json_text) return null_argument("json_text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw mmids::DataError(std::string("config is not valid JSON: ") + e.what());
    }
    *out = new mmids_config{mmids::run_config_from_json(doc, base_dir ? base_dir : "")};
    return MMIDS_OK;
  });
}

void mmids_config_free(mmids_config* config) { delete config; }

mmids_status mmids_config_set_seed(mmids_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.train.seed = seed;
  config->config.ablation.seeds = {seed};
  config->config.gradcheck.seeds = {seed};
  return MMIDS_OK;
}

mmids_status mmids_config_set_data_seed(mmids_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.synthetic.seed = seed;
  return MMIDS_OK;
}

mmids_status mmids_config_set_output_dir(mmids_config* config, const char* dir) {
  if (!config) return null_argument("config");
  if (!dir || !*dir) return fail(MMIDS_ERR_INPUT, "output directory must not be empty");
  config->config.output_dir = dir;
  return MMIDS_OK;
}

mmids_status mmids_generate(const mmids_config* config, const char* out_dir) {
  if (!config) return null_argument("config");
  if (!out_dir || !*out_dir) return fail(MMIDS_ERR_INPUT, "generate needs an output directory");
  return guarded([&] {
    mmids::run_generate(config->config, out_dir);
    return MMIDS_OK;
  });
}

mmids_status mmids_train(const mmids_config* config, double* final_loss) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const auto outcome = mmids::run_train(config->config);
    if (final_loss) {
      *final_loss = outcome.epoch_losses.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                 : outcome.epoch_losses.back();
    }
    return MMIDS_OK;
  });
}

mmids_status mmids_eval(const mmids_config* config, mmids_metrics* out) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const auto report = mmids::run_eval(config->config);
    if (out) {
      *out = {report.confusion.tp, report.confusion.tn, report.confusion.fp, report.confusion.fn,
              report.precision,    report.recall,       report.f1,           report.fp_rate_pct,
              report.fn_rate_pct};
    }
    return MMIDS_OK;
  });
}

mmids_status mmids_gradcheck_run(const mmids_config* config, mmids_gradcheck** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mmids_gradcheck{mmids::run_gradcheck(config->config)};
    if ((*out)->result.passed()) return MMIDS_OK;
    const auto& worst = (*out)->result.worst();
    return fail(MMIDS_ERR_VERIFICATION, "gradient check failed for " + worst.name + " (relative error " +
                                            std::to_string(worst.max_relative_error) + ")");
  });
}

size_t mmids_gradcheck_group_count(const mmids_gradcheck* result) {
  return result ? result->result.groups.size() : 0;
}

const char* mmids_gradcheck_group_name(const mmids_gradcheck* result, size_t index) {
  if (!result || index >= result->result.groups.size()) return nullptr;
  return result->result.groups[index].name.c_str();
}

double mmids_gradcheck_group_error(const mmids_gradcheck* result, size_t index) {
  if (!result || index >= result->result.groups.size()) return std::numeric_limits<double>::quiet_NaN();
  return result->result.groups[index].max_relative_error;
}

double mmids_gradcheck_tolerance(const mmids_gradcheck* result) {
  return result ? result->result.tolerance : std::numeric_limits<double>::quiet_NaN();
}

int mmids_gradcheck_passed(const mmids_gradcheck* result) { return result && result->result.passed() ? 1 : 0; }

void mmids_gradcheck_free(mmids_gradcheck* result) { delete result; }

mmids_status mmids_ablation_run(const mmids_config* config, mmids_ablation** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* handle = new mmids_ablation{mmids::run_ablation(config->config), {}, {}};
    for (const auto& row : handle->result.rows) handle->names.emplace_back(mmids::to_string(row.mode));
    handle->table = mmids::format_ablation_table(handle->result);
    *out = handle;
    return MMIDS_OK;
  });
}

size_t mmids_ablation_row_count(const mmids_ablation* result) { return result ? result->result.rows.size() : 0; }

mmids_status mmids_ablation_row(const mmids_ablation* result, size_t index, const char** modality,
                                double* precision, double* recall, double* f1) {
  if (!result) return null_argument("result");
  if (index >= result->result.rows.size()) return fail(MMIDS_ERR_INPUT, "ablation row index out of range");
  const auto& row = result->result.rows[index];
  if (modality) *modality = result->names[index].c_str();
  if (precision) *precision = row.precision;
  if (recall) *recall = row.recall;
  if (f1) *f1 = row.f1;
  return MMIDS_OK;
}

const char* mmids_ablation_table(const mmids_ablation* result) { return result ? result->table.c_str() : ""; }

void mmids_ablation_free(mmids_ablation* result) { delete result; }

mmids_status mmids_model_load(const char* checkpoint_path, mmids_model** out) {
  if (!checkpoint_path) return null_argument("checkpoint_path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto checkpoint = mmids::load_checkpoint(checkpoint_path);
    std::string modality(mmids::to_string(checkpoint.config.mode));
    *out = new mmids_model{std::move(checkpoint), std::move(modality)};
    return MMIDS_OK;
  });
}

void mmids_model_free(mmids_model* model) { delete model; }

size_t mmids_model_sensor_inputs(const mmids_model* model) {
  return model ? model->checkpoint.config.arch.sensor_inputs : 0;
}

size_t mmids_model_network_inputs(const mmids_model* model) {
  return model ? model->checkpoint.config.arch.network_inputs : 0;
}

size_t mmids_model_window(const mmids_model* model) { return model ? model->checkpoint.config.window : 0; }

const char* mmids_model_modality(const mmids_model* model) { return model ? model->modality.c_str() : ""; }

mmids_status mmids_model_predict(const mmids_model* model, const double* sensor, size_t sensor_len,
                                 const double* network, size_t network_rows, size_t network_cols,
                                 double probabilities[2], int* label) {
  if (!model) return null_argument("model");
  if (!sensor) return null_argument("sensor");
  if (!network) return null_argument("network");
  return guarded([&] {
    const auto& arch = model->checkpoint.config.arch;
    if (sensor_len != arch.sensor_inputs) {
      throw mmids::ShapeError("model expects " + std::to_string(arch.sensor_inputs) + " sensor values, got " +
                              std::to_string(sensor_len));
    }
    if (network_cols != arch.network_inputs || network_rows == 0) {
      throw mmids::ShapeError("model expects network rows of " + std::to_string(arch.network_inputs) +
                              " values, got " + std::to_string(network_rows) + "x" +
                              std::to_string(network_cols));
    }
    mmids::AlignedSample sample;
    sample.sensor.assign(sensor, sensor + sensor_len);
    sample.network = mmids::Matrix(network_rows, network_cols,
                                   std::vector<double>(network, network + network_rows * network_cols));
    for (double v : sample.sensor) {
      if (!std::isfinite(v)) throw mmids::InvalidArgument("sensor input contains a non-finite value");
    }
    if (!sample.network.all_finite()) throw mmids::InvalidArgument("network input contains a non-finite value");
    const auto result = mmids::forward(model->checkpoint.params, sample, model->checkpoint.config.mode);
    if (probabilities) {
      probabilities[0] = result.probabilities[0];
      probabilities[1] = result.probabilities[1];
    }
    if (label) *label = mmids::predict_label(result.probabilities);
    return MMIDS_OK;
  });
}

}  // extern "C"
