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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mmids/synthetic.hpp"
#include "mmids/train.hpp"

namespace mmids {

/// Sensor and network CSV files on disk.
struct DataFiles {
  std::filesystem::path sensor_csv;
  std::filesystem::path network_csv;
  std::size_t sensor_features = kSwatSensorFeatures;
  std::size_t network_features = kSwatNetworkFeatures;
  std::string dataset_id;  // defaults to the sensor file name
};

struct GradCheckSettings {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  double epsilon = 1e-5;
  double tolerance = 1e-4;
};

struct AblationSettings {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t workers = 1;
};

/// Everything one command needs. Relative paths are resolved against the
/// directory of the config file.
///
///   {
///     "data":      {"sensor_csv", "network_csv", "sensor_features", "network_features", "dataset_id"},
///     "synthetic": {SyntheticSpec fields},
///     "model":     {"sensor_widths", "lstm_hidden", "fusion_widths"},
///     "train":     {"window", "epochs", "batch_size", "optimizer", "learning_rate", "beta1",
///                   "beta2", "epsilon", "seed", "train_fraction", "class_weighting"},
///     "modality":  "multi" | "sensor-only" | "network-only",
///     "output":    {"dir", "checkpoint"},
///     "eval":      {"workers"},
///     "ablation":  {"seeds", "workers"},
///     "gradcheck": {"seeds", "epsilon", "tolerance"}
///   }
///
/// Without a "data" section, commands that need data generate it in memory
/// from "synthetic" (defaults if that section is absent too).
struct RunConfig {
  std::optional<DataFiles> data;
  SyntheticSpec synthetic;
  TrainConfig train;
  std::filesystem::path output_dir;
  std::filesystem::path checkpoint;  // empty: <output_dir>/checkpoint.json
  std::size_t eval_workers = 1;
  AblationSettings ablation;
  GradCheckSettings gradcheck;

  std::filesystem::path checkpoint_path() const;
  std::string dataset_id() const;

  void validate() const;
};

/// Throws InvalidArgument on unknown keys, wrong types or invalid values.
RunConfig run_config_from_json(const nlohmann::ordered_json& doc,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace mmids
