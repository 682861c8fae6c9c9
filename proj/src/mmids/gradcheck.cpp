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

#include "mmids/gradcheck.hpp"

#include <algorithm>

#include "mmids/error.hpp"
#include "mmids/finite_difference.hpp"
#include "mmids/rng.hpp"

namespace mmids {

bool GradCheckResult::passed() const {
  return std::all_of(groups.begin(), groups.end(),
                     [&](const GradCheckGroup& g) { return g.max_relative_error <= tolerance; });
}

const GradCheckGroup& GradCheckResult::worst() const {
  if (groups.empty()) throw InvalidArgument("gradient check produced no groups");
  for (const auto& g : groups) {
    if (g.max_relative_error > tolerance) return g;
  }
  return *std::max_element(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.max_relative_error < b.max_relative_error;
  });
}

GradCheckResult gradient_check(const ModelParams& params, std::span<const AlignedSample> batch,
                               BranchMode mode, double eps, double tolerance,
                               const GradientHook& hook) {
  ModelParams analytic = params;
  compute_gradients(analytic, batch, mode);
  if (hook) hook(analytic);
  const std::vector<double> backprop = analytic.flatten_grads();

  ModelParams probe = params;
  const auto loss = [&](std::span<const double> theta) {
    probe.assign(theta);
    return batch_loss(probe, batch, mode);
  };
  const std::vector<double> numeric = finite_difference_gradient(loss, params.flatten(), eps);

  GradCheckResult result;
  result.tolerance = tolerance;
  std::size_t offset = 0;
  for (const auto& [name, tensor] : params.tensors()) {
    GradCheckGroup group{name, 0.0, 0};
    for (std::size_t i = 0; i < tensor->value.size(); ++i) {
      const double err = relative_error(backprop[offset + i], numeric[offset + i]);
      if (err > group.max_relative_error) {
        group.max_relative_error = err;
        group.worst_index = i;
      }
    }
    offset += tensor->value.size();
    result.groups.push_back(std::move(group));
  }
  return result;
}

Architecture tiny_architecture() {
  Architecture arch;
  arch.sensor_inputs = 5;
  arch.network_inputs = 4;
  arch.sensor_widths = {4, 4, 3, 3};
  arch.lstm_hidden = {3, 3, 2};
  arch.fusion_widths = {4, 3};
  return arch;
}

TinyProblem make_tiny_problem(std::uint64_t seed, std::size_t window, std::size_t batch_size) {
  const Architecture arch = tiny_architecture();
  TinyProblem p{ModelParams::initialize(arch, seed), {}};
  SeededRng rng(seed + 1000);
  // Positive dense biases, wider LSTM weights and biases.
  for (auto& [name, tensor] : p.params.tensors()) {
    const bool lstm = name.starts_with("lstm");
    if (!name.ends_with("bias")) {
      if (lstm) {
        for (double& v : tensor->value.values()) v *= 3.0;
      }
      continue;
    }
    for (double& v : tensor->value.values()) v += lstm ? rng.uniform(-1.0, 1.0) : rng.uniform(0.1, 0.5);
  }
  for (std::size_t i = 0; i < batch_size; ++i) {
    AlignedSample s;
    s.sensor.resize(arch.sensor_inputs);
    for (double& v : s.sensor) v = rng.uniform();
    s.network = Matrix(window, arch.network_inputs);
    for (double& v : s.network.values()) v = rng.uniform();
    s.label = static_cast<int>(i % 2);
    p.batch.push_back(std::move(s));
  }
  return p;
}

GradCheckResult merge_results(std::span<const GradCheckResult> results) {
  GradCheckResult merged;
  if (results.empty()) return merged;
  merged = results.front();
  for (const auto& r : results.subspan(1)) {
    for (std::size_t g = 0; g < merged.groups.size(); ++g) {
      if (r.groups[g].max_relative_error > merged.groups[g].max_relative_error) {
        merged.groups[g] = r.groups[g];
      }
    }
  }
  return merged;
}

}  // namespace mmids
