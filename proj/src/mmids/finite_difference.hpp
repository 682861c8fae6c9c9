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

#include <functional>
#include <span>
#include <vector>

namespace mmids {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) for every
/// coordinate. Used as the reference for analytic gradients; it never touches
/// the backward pass.
std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::vector<double> point, double eps);

/// |a - b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

}  // namespace mmids
