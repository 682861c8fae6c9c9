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

#include "mmids/finite_difference.hpp"

#include <algorithm>
#include <cmath>

#include "mmids/error.hpp"

namespace mmids {

std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::vector<double> point, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite difference step must be positive");
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + eps;
    const double up = f(point);
    point[i] = saved - eps;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

}  // namespace mmids
