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

#include "mmids/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmids/error.hpp"

namespace mmids {

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.values()) v = std::max(0.0, v);
  return out;
}

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) throw InvalidArgument("softmax of an empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double bce_term(int label, double prob) {
  const double p = std::clamp(prob, kLogClamp, 1.0 - kLogClamp);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double bce_loss(std::span<const int> labels, std::span<const double> probs) {
  if (labels.size() != probs.size()) {
    throw InvalidArgument("bce_loss: " + std::to_string(labels.size()) + " labels but " +
                          std::to_string(probs.size()) + " probabilities");
  }
  if (labels.empty()) throw InvalidArgument("bce_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw InvalidArgument("bce_loss: label " + std::to_string(labels[i]) + " is not 0 or 1");
    }
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      throw InvalidArgument("bce_loss: probability outside [0, 1] at index " +
                            std::to_string(i));
    }
    total += bce_term(labels[i], probs[i]);
  }
  return total / static_cast<double>(labels.size());
}

void affine(const Matrix& w, std::span<const double> x, std::span<const double> bias,
            std::span<double> out) {
  const std::size_t cols = w.cols();
  const std::size_t rows = w.rows();
  std::size_t r = 0;
  // Four rows at a time; each row still sums its columns in order.
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w.row(r).data();
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double xc = x[c];
      a0 += w0[c] * xc;
      a1 += w1[c] * xc;
      a2 += w2[c] * xc;
      a3 += w3[c] * xc;
    }
    out[r] = a0 + bias[r];
    out[r + 1] = a1 + bias[r + 1];
    out[r + 2] = a2 + bias[r + 2];
    out[r + 3] = a3 + bias[r + 3];
  }
  for (; r < rows; ++r) {
    const double* wr = w.row(r).data();
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    out[r] = acc + bias[r];
  }
}

void add_transposed_product(const Matrix& w, std::span<const double> delta,
                            std::span<double> out) {
  const std::size_t cols = w.cols();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double d = delta[r];
    if (d == 0.0) continue;
    const double* wr = w.row(r).data();
    for (std::size_t c = 0; c < cols; ++c) out[c] += wr[c] * d;
  }
}

void add_outer(Matrix& grad, std::span<const double> delta, std::span<const double> x) {
  const std::size_t cols = grad.cols();
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    const double d = delta[r];
    if (d == 0.0) continue;
    double* gr = grad.row(r).data();
    for (std::size_t c = 0; c < cols; ++c) gr[c] += d * x[c];
  }
}

Matrix dense_forward(const ParamTensor& weight, const ParamTensor& bias, const Matrix& x,
                     Activation activation) {
  const Matrix& w = weight.value;
  const Matrix& b = bias.value;
  if (w.cols() != x.rows()) {
    throw ShapeError("dense_forward: weight " + w.shape() + " cannot multiply input " +
                     x.shape());
  }
  if (b.rows() != w.rows() || b.cols() != 1) {
    throw ShapeError("dense_forward: bias " + b.shape() + " does not match weight " +
                     w.shape());
  }
  Matrix out(w.rows(), x.cols());
  Vector column(x.rows());
  Vector result(w.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) column[i] = x(i, j);
    affine(w, column, b.values(), result);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      out(i, j) = activation == Activation::relu ? std::max(0.0, result[i]) : result[i];
    }
  }
  return out;
}

}  // namespace mmids
