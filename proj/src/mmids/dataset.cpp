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

#include "mmids/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "mmids/error.hpp"
#include "mmids/log.hpp"

namespace mmids {

namespace {

std::vector<AlignedSample> build_samples(const RawModalityTable& sensor,
                                         const RawModalityTable& network,
                                         const std::vector<AlignmentEntry>& index,
                                         std::size_t window) {
  std::vector<AlignedSample> samples;
  samples.reserve(index.size());
  const std::size_t width = network.feature_count();
  for (const auto& entry : index) {
    AlignedSample s;
    const auto row = sensor.values.row(entry.sensor_row);
    s.sensor.assign(row.begin(), row.end());
    s.network = Matrix(window, width);
    const std::size_t first = entry.network_end - window;
    for (std::size_t t = 0; t < window; ++t) {
      const auto src = network.values.row(first + t);
      std::copy(src.begin(), src.end(), s.network.row(t).begin());
    }
    s.label = sensor.labels[entry.sensor_row];
    s.timestamp = sensor.timestamps[entry.sensor_row];
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<AlignmentEntry> checked_index(const RawModalityTable& sensor,
                                          const RawModalityTable& network, std::size_t window) {
  sensor.validate();
  network.validate();
  if (!sensor.has_labels()) throw DataError("sensor table has no label column");
  auto index = alignment_index(sensor, network, window);
  if (index.empty()) {
    throw DataError("no sensor row has " + std::to_string(window) +
                    " preceding network rows; nothing to align");
  }
  return index;
}

PreparedData prepare_impl(const RawModalityTable& sensor, const RawModalityTable& network,
                          std::size_t window, double train_fraction,
                          const PreprocessStats* fitted) {
  const auto index = checked_index(sensor, network, window);
  const std::size_t n_train = chronological_train_count(index.size(), train_fraction);

  PreparedData out;
  if (fitted) {
    out.stats = *fitted;
  } else {
    // The training period ends at the last training sample's sensor row.
    const std::size_t sensor_rows = index[n_train - 1].sensor_row + 1;
    const double cutoff = sensor.timestamps[sensor_rows - 1];
    const auto network_rows = static_cast<std::size_t>(
        std::distance(network.timestamps.begin(),
                      std::upper_bound(network.timestamps.begin(), network.timestamps.end(), cutoff)));
    out.stats.sensor = fit_modality_stats(sensor, sensor_rows);
    out.stats.network = fit_modality_stats(network, network_rows);
  }

  const auto clean_sensor = minmax_normalize(impute_missing(sensor, out.stats.sensor), out.stats.sensor);
  const auto clean_network =
      minmax_normalize(impute_missing(network, out.stats.network), out.stats.network);

  auto split = split_chronological(build_samples(clean_sensor, clean_network, index, window),
                                   train_fraction);
  out.train = std::move(split.train);
  out.test = std::move(split.test);
  out.warnings = std::move(split.warnings);
  return out;
}

}  // namespace

std::vector<AlignmentEntry> alignment_index(const RawModalityTable& sensor,
                                            const RawModalityTable& network, std::size_t window) {
  if (window == 0) throw InvalidArgument("window length must be at least 1");
  std::vector<AlignmentEntry> index;
  index.reserve(sensor.row_count());
  std::size_t end = 0;
  for (std::size_t r = 0; r < sensor.row_count(); ++r) {
    const double t = sensor.timestamps[r];
    while (end < network.row_count() && network.timestamps[end] <= t) ++end;
    if (end >= window) index.push_back({r, end});
  }
  return index;
}

std::vector<AlignedSample> align_modalities(const RawModalityTable& sensor,
                                            const RawModalityTable& network, std::size_t window) {
  const auto index = checked_index(sensor, network, window);
  if (sensor.missing_count() > 0 || network.missing_count() > 0) {
    throw DataError("align_modalities requires imputed tables (missing cells remain)");
  }
  return build_samples(sensor, network, index, window);
}

std::size_t chronological_train_count(std::size_t total, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
  // The small offset keeps products such as 0.7 * 100 = 70.000000000000014
  // and 0.29 * 100 = 28.999999999999996 on the intended side of the floor.
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(total) + 1e-9));
  if (n_train == 0 || n_train >= total) {
    throw InvalidArgument("split of " + std::to_string(total) + " samples at fraction " +
                          std::to_string(train_fraction) + " leaves one side empty");
  }
  return n_train;
}

SplitResult split_chronological(std::vector<AlignedSample> samples, double train_fraction) {
  const std::size_t n_train = chronological_train_count(samples.size(), train_fraction);
  SplitResult out;
  out.test.assign(std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                  std::make_move_iterator(samples.end()));
  samples.resize(n_train);
  out.train = std::move(samples);

  const auto check = [&](const std::vector<AlignedSample>& side, const char* name) {
    const auto attacks = std::count_if(side.begin(), side.end(),
                                       [](const AlignedSample& s) { return s.label == 1; });
    if (attacks == 0) {
      out.warnings.push_back(std::string(name) + " split contains no attack samples");
    } else if (static_cast<std::size_t>(attacks) == side.size()) {
      out.warnings.push_back(std::string(name) + " split contains no normal samples");
    }
  };
  check(out.train, "train");
  check(out.test, "test");
  for (const auto& w : out.warnings) log_warning(w);
  return out;
}

PreparedData prepare_dataset(const RawModalityTable& sensor, const RawModalityTable& network,
                             std::size_t window, double train_fraction) {
  return prepare_impl(sensor, network, window, train_fraction, nullptr);
}

PreparedData prepare_dataset(const RawModalityTable& sensor, const RawModalityTable& network,
                             std::size_t window, double train_fraction,
                             const PreprocessStats& stats) {
  return prepare_impl(sensor, network, window, train_fraction, &stats);
}

}  // namespace mmids
