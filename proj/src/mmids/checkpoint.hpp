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

#include <filesystem>

#include "json.hpp"

#include "mmids/model.hpp"
#include "mmids/train.hpp"

namespace mmids {

inline constexpr int kCheckpointFormatVersion = 1;

/// A saved model: the config it was trained with, free-form metadata, and
/// every tensor. Doubles are written in shortest round-trip form, so a
/// save/load cycle is bit-exact.
struct Checkpoint {
  TrainConfig config;
  ModelParams params;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& checkpoint);

/// Throws DataError on a version mismatch, a missing tensor, or a tensor
/// whose shape disagrees with the recorded config.
Checkpoint checkpoint_from_json(const nlohmann::ordered_json& doc);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// load_checkpoint plus a check that the stored widths equal `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Architecture& expected);

}  // namespace mmids
