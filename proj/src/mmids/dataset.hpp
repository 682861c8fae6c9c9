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
#include <string>
#include <vector>

#include "mmids/matrix.hpp"
#include "mmids/preprocess.hpp"
#include "mmids/table.hpp"

namespace mmids {

/// One sensor reading paired with the network rows that preceded it.
struct AlignedSample {
  Vector sensor;   // x_S
  Matrix network;  // x_N, window x network features, oldest row first
  int label = 0;   // 1 = attack
  double timestamp = 0.0;
};

/// Sensor row `sensor_row` aligns with network rows [network_end - window, network_end).
struct AlignmentEntry {
  std::size_t sensor_row = 0;
  std::size_t network_end = 0;
};

/// For each sensor row at time t, the last `window` network rows with
/// timestamp <= t. Rows with fewer than `window` such network rows are skipped.
std::vector<AlignmentEntry> alignment_index(const RawModalityTable& sensor,
                                            const RawModalityTable& network, std::size_t window);

/// Builds samples from preprocessed tables. Throws DataError if nothing aligns,
/// if the sensor table has no labels, or if a table still has missing cells.
std::vector<AlignedSample> align_modalities(const RawModalityTable& sensor,
                                            const RawModalityTable& network, std::size_t window);

/// floor(fraction * total); validates 0 < fraction < 1 and that both sides are nonempty.
std::size_t chronological_train_count(std::size_t total, double train_fraction);

struct SplitResult {
  std::vector<AlignedSample> train;
  std::vector<AlignedSample> test;
  std::vector<std::string> warnings;  // also sent to the log
};

/// First floor(fraction * M) samples train, the rest test; order is kept.
SplitResult split_chronological(std::vector<AlignedSample> samples, double train_fraction);

/// Output of the whole preprocessing path.
struct PreparedData {
  PreprocessStats stats;
  std::vector<AlignedSample> train;
  std::vector<AlignedSample> test;
  std::vector<std::string> warnings;
};

/// Align, split chronologically, fit stats on the training period only, then
/// impute and normalize both tables with those stats.
PreparedData prepare_dataset(const RawModalityTable& sensor, const RawModalityTable& network,
                             std::size_t window, double train_fraction);

/// Same split, but with previously fitted stats (evaluation).
PreparedData prepare_dataset(const RawModalityTable& sensor, const RawModalityTable& network,
                             std::size_t window, double train_fraction,
                             const PreprocessStats& stats);

}  // namespace mmids
