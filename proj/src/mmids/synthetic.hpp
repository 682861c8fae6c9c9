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

#include "json.hpp"

#include "mmids/table.hpp"

namespace mmids {

/// Parameters of the synthetic water-treatment-like process. Amplitudes and
/// attack magnitudes are in units of each feature's own scale.
struct SyntheticSpec {
  std::size_t sample_count = 10000;  // sensor rows
  double attack_ratio = 0.121;
  std::size_t window = 8;            // network rows every sensor row must have behind it
  std::uint64_t seed = 7;
  std::size_t sensor_features = kSwatSensorFeatures;
  std::size_t network_features = kSwatNetworkFeatures;
  std::size_t packets_per_sample = 4;
  double sinusoid_amplitude = 1.0;
  double drift_amplitude = 0.2;
  double noise_level = 0.05;
  double sensor_attack_magnitude = 4.0;
  double network_attack_magnitude = 4.0;
  // An attack window is strong in one or both modalities; in a modality it
  // hides from, its magnitude is multiplied by this factor.
  double stealth_factor = 0.1;
  // Attacks only ever touch this many features of each modality (a fixed set
  // per seed, capped at the feature count); each window hits a few of them.
  std::size_t sensor_attack_surface = 8;
  std::size_t network_attack_surface = 5;
  std::size_t min_attack_length = 20;
  std::size_t max_attack_length = 120;
  double missing_rate = 0.0005;

  void validate() const;
};

nlohmann::ordered_json synthetic_spec_to_json(const SyntheticSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
SyntheticSpec synthetic_spec_from_json(const nlohmann::ordered_json& doc);

struct SyntheticData {
  RawModalityTable sensor;
  RawModalityTable network;
};

/// Deterministic in `spec.seed`: the same spec always yields the same tables.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes sensor.csv, network.csv and spec.json into `dir` (created if needed).
void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec,
                     const std::filesystem::path& dir);

}  // namespace mmids
