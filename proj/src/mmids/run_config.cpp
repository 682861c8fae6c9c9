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

#include "mmids/run_config.hpp"

#include <string>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"

namespace mmids {

namespace {

using Json = nlohmann::ordered_json;

const Json& section(const Json& doc, const std::string& key) {
  static const Json empty = Json::object();
  const auto it = doc.find(key);
  if (it == doc.end()) return empty;
  if (!it->is_object()) throw InvalidArgument("'" + key + "' must be an object");
  return *it;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void read_path(const Json& obj, const std::string& key, std::filesystem::path& out,
               const std::filesystem::path& base, std::string_view ctx) {
  std::string value;
  read_optional(obj, key, value, ctx);
  if (!value.empty()) out = resolve(base, value);
}

std::vector<std::uint64_t> read_seeds(const Json& obj, std::string_view ctx) {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  const auto it = obj.find("seeds");
  if (it == obj.end()) return seeds;
  if (!it->is_array() || it->empty()) {
    throw InvalidArgument("'seeds' in " + std::string(ctx) + " must be a nonempty array");
  }
  seeds.clear();
  for (const auto& v : *it) {
    if (!is_nonnegative_integer(v)) {
      throw InvalidArgument("'seeds' in " + std::string(ctx) + " must hold nonnegative integers");
    }
    seeds.push_back(v.get<std::uint64_t>());
  }
  return seeds;
}

}  // namespace

std::filesystem::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? output_dir / "checkpoint.json" : checkpoint;
}

std::string RunConfig::dataset_id() const {
  if (data) return data->dataset_id.empty() ? data->sensor_csv.filename().string() : data->dataset_id;
  return "synthetic-seed-" + std::to_string(synthetic.seed);
}

void RunConfig::validate() const {
  train.validate();
  synthetic.validate();
  if (data) {
    if (data->sensor_csv.empty() || data->network_csv.empty()) {
      throw InvalidArgument("'data' needs both 'sensor_csv' and 'network_csv'");
    }
    if (data->sensor_features == 0 || data->network_features == 0) {
      throw InvalidArgument("feature counts in 'data' must be positive");
    }
  }
  if (eval_workers == 0 || ablation.workers == 0) throw InvalidArgument("'workers' must be at least 1");
  if (ablation.seeds.empty() || gradcheck.seeds.empty()) throw InvalidArgument("'seeds' must not be empty");
  if (!(gradcheck.epsilon > 0.0)) throw InvalidArgument("gradcheck 'epsilon' must be positive");
  if (!(gradcheck.tolerance > 0.0)) throw InvalidArgument("gradcheck 'tolerance' must be positive");
}

RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"data", "synthetic", "model", "train", "modality", "output", "eval", "ablation",
                       "gradcheck"},
                      "config");
  RunConfig cfg;

  if (doc.contains("data")) {
    const Json& d = section(doc, "data");
    reject_unknown_keys(d, {"sensor_csv", "network_csv", "sensor_features", "network_features", "dataset_id"},
                        "data");
    DataFiles files;
    if (!d.contains("sensor_csv") || !d.contains("network_csv")) {
      throw InvalidArgument("'data' needs both 'sensor_csv' and 'network_csv'");
    }
    read_path(d, "sensor_csv", files.sensor_csv, base_dir, "data");
    read_path(d, "network_csv", files.network_csv, base_dir, "data");
    read_optional(d, "sensor_features", files.sensor_features, "data");
    read_optional(d, "network_features", files.network_features, "data");
    read_optional(d, "dataset_id", files.dataset_id, "data");
    cfg.data = std::move(files);
  }

  // Model and training settings share TrainConfig's strict parser.
  const Json& model = section(doc, "model");
  reject_unknown_keys(model, {"sensor_widths", "lstm_hidden", "fusion_widths"}, "model");
  const Json& train = section(doc, "train");
  reject_unknown_keys(train,
                      {"window", "epochs", "batch_size", "optimizer", "learning_rate", "beta1", "beta2",
                       "epsilon", "seed", "train_fraction", "class_weighting"},
                      "train");
  Json merged = Json::object();
  for (const auto& [k, v] : model.items()) merged[k] = v;
  for (const auto& [k, v] : train.items()) merged[k] = v;
  if (doc.contains("modality")) merged["modality"] = doc.at("modality");

  const Json& synthetic = section(doc, "synthetic");
  {
    Json spec = synthetic;
    if (!spec.contains("window") && train.contains("window")) spec["window"] = train.at("window");
    cfg.synthetic = synthetic_spec_from_json(spec);
  }
  if (cfg.data) {
    merged["sensor_inputs"] = cfg.data->sensor_features;
    merged["network_inputs"] = cfg.data->network_features;
  } else {
    merged["sensor_inputs"] = cfg.synthetic.sensor_features;
    merged["network_inputs"] = cfg.synthetic.network_features;
  }
  cfg.train = train_config_from_json(merged);

  const Json& output = section(doc, "output");
  reject_unknown_keys(output, {"dir", "checkpoint"}, "output");
  read_path(output, "dir", cfg.output_dir, base_dir, "output");
  read_path(output, "checkpoint", cfg.checkpoint, base_dir, "output");

  const Json& eval = section(doc, "eval");
  reject_unknown_keys(eval, {"workers"}, "eval");
  read_optional(eval, "workers", cfg.eval_workers, "eval");

  const Json& ablation = section(doc, "ablation");
  reject_unknown_keys(ablation, {"seeds", "workers"}, "ablation");
  cfg.ablation.seeds = read_seeds(ablation, "ablation");
  read_optional(ablation, "workers", cfg.ablation.workers, "ablation");

  const Json& gradcheck = section(doc, "gradcheck");
  reject_unknown_keys(gradcheck, {"seeds", "epsilon", "tolerance"}, "gradcheck");
  cfg.gradcheck.seeds = read_seeds(gradcheck, "gradcheck");
  read_optional(gradcheck, "epsilon", cfg.gradcheck.epsilon, "gradcheck");
  read_optional(gradcheck, "tolerance", cfg.gradcheck.tolerance, "gradcheck");

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  try {
    return run_config_from_json(doc, path.parent_path());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace mmids
