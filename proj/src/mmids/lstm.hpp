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
#include <span>
#include <vector>

#include "mmids/matrix.hpp"

namespace mmids {

/// Gate blocks inside the stacked 4*hidden pre-activation vector.
enum LstmGate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };

/// One LSTM layer. Rows of every tensor are grouped by gate in the order
/// [input, forget, cell candidate, output], each block `hidden` rows tall.
struct LstmCellParams {
  ParamTensor input_weights;      // 4H x I
  ParamTensor recurrent_weights;  // 4H x H
  ParamTensor bias;               // 4H x 1

  LstmCellParams() = default;
  LstmCellParams(std::size_t input_size, std::size_t hidden_size);

  std::size_t input_size() const { return input_weights.value.cols(); }
  std::size_t hidden_size() const { return recurrent_weights.value.cols(); }

  /// Throws ShapeError unless the three tensors agree on input/hidden sizes.
  void validate() const;
};

struct LstmState {
  Vector h;
  Vector c;
};

/// One time step:
///   i = sigmoid(.), f = sigmoid(.), g = tanh(.), o = sigmoid(.)
///   c_t = f * c_prev + i * g,  h_t = o * tanh(c_t)
LstmState lstm_cell_step(const LstmCellParams& params, std::span<const double> x,
                         std::span<const double> h_prev, std::span<const double> c_prev);

/// Per-step values kept for backpropagation through time.
struct LstmStepCache {
  Vector gates;  // post-activation [i, f, g, o], 4H
  Vector c;
  Vector tanh_c;
};

struct LstmSequenceCache {
  std::vector<LstmStepCache> steps;
};

/// Runs a zero-initialized layer over `inputs` (T x I, oldest row first) and
/// returns every step's hidden state (T x H).
Matrix lstm_forward_sequence(const LstmCellParams& params, const Matrix& inputs,
                             LstmSequenceCache* cache);

/// Backpropagation through time. `d_outputs` is dLoss/dh_t for every step
/// (T x H). Accumulates into the parameter grads and returns dLoss/dinputs.
Matrix lstm_backward_sequence(LstmCellParams& params, const Matrix& inputs,
                              const Matrix& outputs, const LstmSequenceCache& cache,
                              const Matrix& d_outputs);

}  // namespace mmids
