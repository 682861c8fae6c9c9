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
#include <string>
#include <vector>

#include "mmids/evaluation.hpp"
#include "mmids/gradcheck.hpp"
#include "mmids/run_config.hpp"
#include "mmids/synthetic.hpp"

namespace mmids {

/// Raw tables for a run, read from CSV or generated in memory.
struct LoadedData {
  RawModalityTable sensor;
  RawModalityTable network;
  std::string id;
};

LoadedData load_data(const RunConfig& config);

struct GenerateOutcome {
  std::size_t sensor_rows = 0;
  std::size_t network_rows = 0;
  double attack_fraction = 0.0;
};

/// Writes sensor.csv, network.csv and spec.json into `out_dir`.
GenerateOutcome run_generate(const RunConfig& config, const std::filesystem::path& out_dir);

struct TrainOutcome {
  std::vector<double> epoch_losses;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::vector<std::string> warnings;
};

/// Fits stats on the training split, trains, and writes checkpoint.json,
/// stats.json and loss.csv into the output directory.
TrainOutcome run_train(const RunConfig& config);

/// Evaluates the saved checkpoint on the test split with the saved stats and
/// writes report.json and report.csv next to it.
EvalReport run_eval(const RunConfig& config);

/// Gradient check of the tiny model for every configured seed. `per_seed`
/// receives the unmerged results when given.
GradCheckResult run_gradcheck(const RunConfig& config, std::vector<GradCheckResult>* per_seed = nullptr);

struct AblationRow {
  BranchMode mode = BranchMode::multi;
  double precision = 0.0;  // means over seeds
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<EvalReport> per_seed;
};

struct AblationResult {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;  // multi, sensor-only, network-only
};

/// Trains and evaluates every mode for every seed on one split. Writes
/// ablation.csv and ablation.json when an output directory is configured.
AblationResult run_ablation(const RunConfig& config);

/// Fixed-width text rendering of the three-row table.
std::string format_ablation_table(const AblationResult& result);

/// FNV-1a of the compact JSON form, as 16 hex digits.
std::string stats_digest(const PreprocessStats& stats);

}  // namespace mmids
