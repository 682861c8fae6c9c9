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

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Plain-array LSTM, written out gate by gate. Shares no code with the library.
struct LstmLayerWeights {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::vector<double> u;  // (4 * hidden) x input, row-major, gates i f g o
  std::vector<double> w;  // (4 * hidden) x hidden
  std::vector<double> b;  // 4 * hidden
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline void reference_step(const LstmLayerWeights& p, const std::vector<double>& x, std::vector<double>& h,
                           std::vector<double>& c) {
  const std::size_t n = p.hidden;
  std::vector<double> h_new(n), c_new(n);
  for (std::size_t k = 0; k < n; ++k) {
    double zi = p.b[0 * n + k];
    double zf = p.b[1 * n + k];
    double zg = p.b[2 * n + k];
    double zo = p.b[3 * n + k];
    for (std::size_t j = 0; j < p.input; ++j) {
      zi += p.u[(0 * n + k) * p.input + j] * x[j];
      zf += p.u[(1 * n + k) * p.input + j] * x[j];
      zg += p.u[(2 * n + k) * p.input + j] * x[j];
      zo += p.u[(3 * n + k) * p.input + j] * x[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      zi += p.w[(0 * n + k) * n + j] * h[j];
      zf += p.w[(1 * n + k) * n + j] * h[j];
      zg += p.w[(2 * n + k) * n + j] * h[j];
      zo += p.w[(3 * n + k) * n + j] * h[j];
    }
    const double i = logistic(zi);
    const double f = logistic(zf);
    const double g = std::tanh(zg);
    const double o = logistic(zo);
    c_new[k] = f * c[k] + i * g;
    h_new[k] = o * std::tanh(c_new[k]);
  }
  h = h_new;
  c = c_new;
}

// Unrolls every layer over the whole sequence; returns the last layer's final h.
inline std::vector<double> reference_stack(const std::vector<LstmLayerWeights>& layers,
                                           std::vector<std::vector<double>> sequence) {
  for (const auto& layer : layers) {
    std::vector<double> h(layer.hidden, 0.0), c(layer.hidden, 0.0);
    std::vector<std::vector<double>> outputs;
    for (const auto& x : sequence) {
      reference_step(layer, x, h, c);
      outputs.push_back(h);
    }
    sequence = outputs;
  }
  return sequence.back();
}

}  // namespace oracle
