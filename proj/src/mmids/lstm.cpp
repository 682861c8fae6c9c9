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

#include "mmids/lstm.hpp"

#include <cmath>
#include <string>

#include "mmids/error.hpp"
#include "mmids/layers.hpp"

namespace mmids {

namespace {

// pre = U x + W h + b, then the gate nonlinearities in place.
void gate_activations(const LstmCellParams& p, std::span<const double> x,
                      std::span<const double> h_prev, std::span<double> gates) {
  const std::size_t hidden = p.hidden_size();
  const Matrix& u = p.input_weights.value;
  const Matrix& w = p.recurrent_weights.value;
  const Matrix& b = p.bias.value;
  const std::size_t in = u.cols();
  const std::size_t rows = 4 * hidden;
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const double* ur = u.row(r).data();
    for (std::size_t c = 0; c < in; ++c) {
      const double xc = x[c];
      for (std::size_t j = 0; j < 4; ++j) acc[j] += ur[j * in + c] * xc;
    }
    const double* wr = w.row(r).data();
    for (std::size_t c = 0; c < hidden; ++c) {
      const double hc = h_prev[c];
      for (std::size_t j = 0; j < 4; ++j) acc[j] += wr[j * hidden + c] * hc;
    }
    for (std::size_t j = 0; j < 4; ++j) gates[r + j] = acc[j] + b[r + j];
  }
  for (; r < rows; ++r) {
    const double* ur = u.row(r).data();
    const double* wr = w.row(r).data();
    double acc = 0.0;
    for (std::size_t c = 0; c < in; ++c) acc += ur[c] * x[c];
    for (std::size_t c = 0; c < hidden; ++c) acc += wr[c] * h_prev[c];
    gates[r] = acc + b[r];
  }
  for (r = 0; r < rows; ++r) {
    gates[r] = r / hidden == kCellGate ? std::tanh(gates[r]) : sigmoid(gates[r]);
  }
}

void check_step_shapes(const LstmCellParams& p, std::size_t x, std::size_t h, std::size_t c) {
  if (x != p.input_size() || h != p.hidden_size() || c != p.hidden_size()) {
    throw ShapeError("lstm_cell_step: layer expects input " + std::to_string(p.input_size()) +
                     " and hidden " + std::to_string(p.hidden_size()) + ", got input " +
                     std::to_string(x) + ", h " + std::to_string(h) + ", c " +
                     std::to_string(c));
  }
}

}  // namespace

LstmCellParams::LstmCellParams(std::size_t input_size, std::size_t hidden_size)
    : input_weights(4 * hidden_size, input_size),
      recurrent_weights(4 * hidden_size, hidden_size),
      bias(4 * hidden_size, 1) {}

void LstmCellParams::validate() const {
  const std::size_t hidden = recurrent_weights.value.cols();
  const bool ok = hidden > 0 && recurrent_weights.value.rows() == 4 * hidden &&
                  input_weights.value.rows() == 4 * hidden && input_weights.value.cols() > 0 &&
                  bias.value.rows() == 4 * hidden && bias.value.cols() == 1;
  if (!ok) {
    throw ShapeError("inconsistent LSTM layer: U " + input_weights.value.shape() + ", W " +
                     recurrent_weights.value.shape() + ", b " + bias.value.shape());
  }
}

LstmState lstm_cell_step(const LstmCellParams& params, std::span<const double> x,
                         std::span<const double> h_prev, std::span<const double> c_prev) {
  params.validate();
  check_step_shapes(params, x.size(), h_prev.size(), c_prev.size());
  const std::size_t hidden = params.hidden_size();
  Vector gates(4 * hidden);
  gate_activations(params, x, h_prev, gates);
  LstmState out{Vector(hidden), Vector(hidden)};
  for (std::size_t k = 0; k < hidden; ++k) {
    const double i = gates[kInputGate * hidden + k];
    const double f = gates[kForgetGate * hidden + k];
    const double g = gates[kCellGate * hidden + k];
    const double o = gates[kOutputGate * hidden + k];
    out.c[k] = f * c_prev[k] + i * g;
    out.h[k] = o * std::tanh(out.c[k]);
  }
  return out;
}

Matrix lstm_forward_sequence(const LstmCellParams& params, const Matrix& inputs,
                             LstmSequenceCache* cache) {
  if (inputs.rows() == 0) throw InvalidArgument("LSTM input sequence has no time steps");
  if (inputs.cols() != params.input_size()) {
    throw ShapeError("LSTM layer expects " + std::to_string(params.input_size()) +
                     " input features, sequence is " + inputs.shape());
  }
  const std::size_t steps = inputs.rows();
  const std::size_t hidden = params.hidden_size();
  Matrix outputs(steps, hidden);
  Vector h(hidden, 0.0), c(hidden, 0.0);
  LstmStepCache scratch;
  if (cache) cache->steps.assign(steps, {});
  for (std::size_t t = 0; t < steps; ++t) {
    LstmStepCache& step = cache ? cache->steps[t] : scratch;
    step.gates.resize(4 * hidden);
    step.c.resize(hidden);
    step.tanh_c.resize(hidden);
    gate_activations(params, inputs.row(t), h, step.gates);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double i = step.gates[kInputGate * hidden + k];
      const double f = step.gates[kForgetGate * hidden + k];
      const double g = step.gates[kCellGate * hidden + k];
      const double o = step.gates[kOutputGate * hidden + k];
      c[k] = f * c[k] + i * g;
      step.c[k] = c[k];
      step.tanh_c[k] = std::tanh(c[k]);
      h[k] = o * step.tanh_c[k];
      outputs(t, k) = h[k];
    }
  }
  return outputs;
}

Matrix lstm_backward_sequence(LstmCellParams& params, const Matrix& inputs,
                              const Matrix& outputs, const LstmSequenceCache& cache,
                              const Matrix& d_outputs) {
  const std::size_t steps = inputs.rows();
  const std::size_t hidden = params.hidden_size();
  if (cache.steps.size() != steps || !d_outputs.same_shape(outputs)) {
    throw InvalidArgument("LSTM backward called without a matching forward pass");
  }
  Matrix d_inputs(steps, inputs.cols());
  Vector dh_next(hidden, 0.0), dc_next(hidden, 0.0);
  Vector d_pre(4 * hidden);
  const Vector zeros(hidden, 0.0);

  for (std::size_t t = steps; t-- > 0;) {
    const LstmStepCache& step = cache.steps[t];
    const std::span<const double> c_prev =
        t > 0 ? std::span<const double>(cache.steps[t - 1].c) : std::span<const double>(zeros);
    const std::span<const double> h_prev = t > 0 ? outputs.row(t - 1) : std::span<const double>(zeros);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double i = step.gates[kInputGate * hidden + k];
      const double f = step.gates[kForgetGate * hidden + k];
      const double g = step.gates[kCellGate * hidden + k];
      const double o = step.gates[kOutputGate * hidden + k];
      const double dh = d_outputs(t, k) + dh_next[k];
      const double tc = step.tanh_c[k];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[k];
      d_pre[kInputGate * hidden + k] = dc * g * i * (1.0 - i);
      d_pre[kForgetGate * hidden + k] = dc * c_prev[k] * f * (1.0 - f);
      d_pre[kCellGate * hidden + k] = dc * i * (1.0 - g * g);
      d_pre[kOutputGate * hidden + k] = dh * tc * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    add_outer(params.input_weights.grad, d_pre, inputs.row(t));
    add_outer(params.recurrent_weights.grad, d_pre, h_prev);
    for (std::size_t r = 0; r < 4 * hidden; ++r) params.bias.grad[r] += d_pre[r];
    add_transposed_product(params.input_weights.value, d_pre, d_inputs.row(t));
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    add_transposed_product(params.recurrent_weights.value, d_pre, dh_next);
  }
  return d_inputs;
}

}  // namespace mmids
