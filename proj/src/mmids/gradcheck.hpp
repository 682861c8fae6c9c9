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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mmids/model.hpp"

namespace mmids {

struct GradCheckGroup {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;  // element of the tensor with the largest error
};

struct GradCheckResult {
  std::vector<GradCheckGroup> groups;  // one per tensor, ModelParams order
  double tolerance = 0.0;

  bool passed() const;
  /// First group above tolerance, or the overall worst when all pass.
  const GradCheckGroup& worst() const;
};

/// Called with the analytic gradients right before they are compared, so a
/// test can corrupt them and watch the check fail.
using GradientHook = std::function<void(ModelParams&)>;

/// Compares backprop against central finite differences of batch_loss for
/// every parameter.
GradCheckResult gradient_check(const ModelParams& params, std::span<const AlignedSample> batch,
                               BranchMode mode, double eps, double tolerance,
                               const GradientHook& hook = {});

/// The small instance used by `gradcheck`: 5 sensor features, 4 network
/// features, window 3, widths sensor (4,4,3,3), LSTM (3,3,2), fusion (4,3).
Architecture tiny_architecture();

struct TinyProblem {
  ModelParams params;
  std::vector<AlignedSample> batch;
};

/// Seeded random parameters (biases included, LSTM weights scaled by 3) and a
/// small mixed-label batch.
TinyProblem make_tiny_problem(std::uint64_t seed, std::size_t window = 3, std::size_t batch_size = 3);

/// Merges per-seed results into per-group maxima.
GradCheckResult merge_results(std::span<const GradCheckResult> results);

}  // namespace mmids
