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

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mmids/matrix.hpp"

namespace mmids {

enum class Modality { sensor, network };

std::string_view to_string(Modality modality);

/// Feature counts of the SWaT testbed export.
inline constexpr std::size_t kSwatSensorFeatures = 51;
inline constexpr std::size_t kSwatNetworkFeatures = 16;

/// Marker for a missing cell.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// One modality's rows as read from disk. Values are rows x features; a NaN
/// cell is missing. Rows are sorted by timestamp (nondecreasing).
struct RawModalityTable {
  Modality modality = Modality::sensor;
  std::vector<std::string> feature_names;
  std::vector<double> timestamps;
  Matrix values;
  std::vector<int> labels;  // empty when the source has no label column

  std::size_t row_count() const { return timestamps.size(); }
  std::size_t feature_count() const { return feature_names.size(); }
  bool has_labels() const { return !labels.empty(); }
  std::size_t missing_count() const;

  /// Checks shape agreement, timestamp order, and label values.
  void validate() const;
};

/// Reads a CSV with header `timestamp,<features...>[,label]`. An empty cell is
/// missing. Throws DataError naming the file, row and column on any problem.
RawModalityTable ingest_csv(const std::filesystem::path& path, Modality modality,
                            std::size_t expected_feature_count);

/// Same schema as ingest_csv; numbers use the shortest round-trip form.
void write_csv(const RawModalityTable& table, const std::filesystem::path& path);

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace mmids
