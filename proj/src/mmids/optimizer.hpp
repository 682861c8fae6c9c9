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
#include <span>
#include <string_view>
#include <vector>

#include "mmids/matrix.hpp"

namespace mmids {

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws InvalidArgument on a nonpositive learning rate or out-of-range moments.
  void validate() const;
};

/// SGD or Adam (bias-corrected). Adam keeps first/second moments per tensor,
/// keyed by position in the span passed to step(), so callers must pass the
/// same tensors in the same order every time.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  void step(std::span<ParamTensor* const> params);

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t steps_taken() const { return steps_; }

 private:
  OptimizerConfig config_;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  std::uint64_t steps_ = 0;
};

}  // namespace mmids
