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
#include <span>

#include "mmids/matrix.hpp"

namespace mmids {

enum class Activation { none, relu };

/// Probabilities are clamped to [kLogClamp, 1 - kLogClamp] before the logs in
/// the cross-entropy loss.
inline constexpr double kLogClamp = 1e-12;

Matrix relu(const Matrix& x);

/// Max-subtracted softmax. Throws InvalidArgument on empty input.
Vector softmax(std::span<const double> logits);

/// Single-sample cross-entropy term -[y log p + (1-y) log(1-p)], p clamped.
double bce_term(int label, double prob);

/// Mean binary cross entropy over a batch.
double bce_loss(std::span<const int> labels, std::span<const double> probs);

/// activation(W x + b). x holds one sample per column; b is W.rows() x 1.
Matrix dense_forward(const ParamTensor& weight, const ParamTensor& bias, const Matrix& x,
                     Activation activation);

// Kernels shared by the model's forward and backward passes. All loops
// accumulate sequentially in row-major order, so results are bitwise
// reproducible for fixed inputs.

/// out = W x + b.
void affine(const Matrix& w, std::span<const double> x, std::span<const double> bias,
            std::span<double> out);
/// out += W^T delta.
void add_transposed_product(const Matrix& w, std::span<const double> delta,
                            std::span<double> out);
/// grad += delta x^T.
void add_outer(Matrix& grad, std::span<const double> delta, std::span<const double> x);

inline double sigmoid(double z) {
  // Split keeps exp() from overflowing for large |z|.
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace mmids
