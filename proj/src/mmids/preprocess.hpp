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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "mmids/table.hpp"

namespace mmids {

/// Statistics of one feature over the observed training values.
struct FeatureStats {
  std::string name;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t observed = 0;  // 0 means the feature cannot be imputed

  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

struct ModalityStats {
  std::vector<FeatureStats> features;

  friend bool operator==(const ModalityStats&, const ModalityStats&) = default;
};

/// Fitted on the training portion only; applied to every split.
struct PreprocessStats {
  ModalityStats sensor;
  ModalityStats network;

  const ModalityStats& for_modality(Modality m) const {
    return m == Modality::sensor ? sensor : network;
  }

  friend bool operator==(const PreprocessStats&, const PreprocessStats&) = default;
};

/// Fits mean/min/max on the first `train_rows` rows of `table`, skipping
/// missing cells.
ModalityStats fit_modality_stats(const RawModalityTable& table, std::size_t train_rows);

/// Replaces every missing cell with its feature's training mean. Throws
/// DataError for a feature that had no observed training values.
RawModalityTable impute_missing(RawModalityTable table, const ModalityStats& stats);

/// (x - min) / (max - min), clamped to [0, 1]. A constant feature maps to 0.
RawModalityTable minmax_normalize(RawModalityTable table, const ModalityStats& stats);

/// JSON object keyed by modality then feature name, feature order preserved.
nlohmann::ordered_json stats_to_json(const PreprocessStats& stats);
PreprocessStats stats_from_json(const nlohmann::ordered_json& doc);

void save_stats(const PreprocessStats& stats, const std::filesystem::path& path);
PreprocessStats load_stats(const std::filesystem::path& path);

}  // namespace mmids
