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
#include <span>
#include <vector>

#include "json.hpp"

#include "mmids/model.hpp"
#include "mmids/optimizer.hpp"

namespace mmids {

struct TrainConfig {
  Architecture arch;
  std::size_t window = 8;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  // Reweights each class to M / (2 * class count). Off by default.
  bool class_weighting = false;
  BranchMode mode = BranchMode::multi;

  void validate() const;
};

nlohmann::ordered_json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::ordered_json& doc);

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;  // mean sample loss seen during each epoch
};

/// Seed streams. Initialization draws from `seed`; minibatch order from
/// `seed` mixed with a fixed constant so the two never share a sequence.
std::uint64_t batch_order_seed(std::uint64_t seed);

/// Minibatch training. Each epoch visits the samples in a freshly shuffled
/// order, and every minibatch takes one optimizer step on the mean loss.
/// Throws NumericalError (naming epoch and batch) on a non-finite loss.
TrainResult train(const TrainConfig& config, std::span<const AlignedSample> samples);

/// Same, starting from given parameters instead of a fresh initialization.
TrainResult train_from(const TrainConfig& config, ModelParams initial,
                       std::span<const AlignedSample> samples);

}  // namespace mmids
