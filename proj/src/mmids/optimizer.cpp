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

#include "mmids/optimizer.hpp"

#include <cmath>
#include <string>

#include "mmids/error.hpp"

namespace mmids {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw InvalidArgument("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning rate must be positive, got " + std::to_string(learning_rate));
  }
  if (kind == OptimizerKind::adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw InvalidArgument("Adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
  }
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::step(std::span<ParamTensor* const> params) {
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::sgd) {
    for (ParamTensor* p : params) {
      auto value = p->value.values();
      auto grad = p->grad.values();
      for (std::size_t i = 0; i < value.size(); ++i) value[i] -= lr * grad[i];
    }
    return;
  }

  if (first_moment_.empty()) {
    for (const ParamTensor* p : params) {
      first_moment_.emplace_back(p->value.rows(), p->value.cols());
      second_moment_.emplace_back(p->value.rows(), p->value.cols());
    }
  } else if (first_moment_.size() != params.size()) {
    throw InvalidArgument("optimizer step called with a different tensor set");
  }

  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto value = params[k]->value.values();
    auto grad = params[k]->grad.values();
    auto m = first_moment_[k].values();
    auto v = second_moment_[k].values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace mmids
