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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmids/dataset.hpp"
#include "mmids/lstm.hpp"
#include "mmids/matrix.hpp"

namespace mmids {

/// Which branches feed the fusion network. Single-modality modes zero the
/// other branch's latent slot, so every mode has the same parameter shapes.
enum class BranchMode { multi, sensor_only, network_only };

std::string_view to_string(BranchMode mode);
BranchMode parse_branch_mode(std::string_view name);

/// Layer widths. Input sizes come from the data; everything else is free.
struct Architecture {
  std::size_t sensor_inputs = kSwatSensorFeatures;
  std::size_t network_inputs = kSwatNetworkFeatures;
  std::array<std::size_t, 4> sensor_widths{64, 48, 32, 16};
  std::array<std::size_t, 3> lstm_hidden{32, 32, 16};
  std::array<std::size_t, 2> fusion_widths{32, 16};

  std::size_t sensor_latent() const { return sensor_widths.back(); }
  std::size_t network_latent() const { return lstm_hidden.back(); }
  std::size_t fusion_inputs() const { return sensor_latent() + network_latent(); }
  std::size_t joint_width() const { return fusion_widths.back(); }

  void validate() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

inline constexpr std::size_t kClassCount = 2;

struct DenseLayer {
  ParamTensor weight;  // out x in
  ParamTensor bias;    // out x 1

  DenseLayer() = default;
  DenseLayer(std::size_t inputs, std::size_t outputs) : weight(outputs, inputs), bias(outputs, 1) {}
};

struct NamedTensor {
  std::string name;
  ParamTensor* tensor;
};

struct ConstNamedTensor {
  std::string name;
  const ParamTensor* tensor;
};

/// Every learnable tensor of the detector.
struct ModelParams {
  Architecture arch;
  std::array<DenseLayer, 4> sensor;
  std::array<LstmCellParams, 3> lstm;
  std::array<DenseLayer, 2> fusion;
  DenseLayer classifier;

  /// All tensors zero.
  static ModelParams zeros(const Architecture& arch);

  /// Glorot-uniform weights, zero biases, LSTM forget-gate bias +1.
  static ModelParams initialize(const Architecture& arch, std::uint64_t seed);

  /// Stable order and names; the order is also the flattening order.
  std::vector<NamedTensor> tensors();
  std::vector<ConstNamedTensor> tensors() const;

  void zero_grads();
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  std::vector<double> flatten_grads() const;

  /// Throws ShapeError unless every tensor matches `arch`.
  void validate() const;
};

/// Intermediate representations of one sample.
struct LatentPair {
  Vector sensor_latent;   // h_S
  Vector network_latent;  // o_N
  Vector joint;           // h
};

using Probabilities = std::array<double, kClassCount>;

/// Four dense + ReLU layers.
Vector sensor_encode(const ModelParams& params, std::span<const double> sensor);

/// Three stacked LSTM layers; layers 1-2 pass their whole output sequence on,
/// layer 3 contributes only its last step.
Vector network_encode(const ModelParams& params, const Matrix& network);

/// Two dense + ReLU layers over concat(h_S, o_N).
Vector fuse(const ModelParams& params, std::span<const double> sensor_latent,
            std::span<const double> network_latent);

/// softmax(W_c h + b_c); index 1 is the attack class.
Probabilities classify(const ModelParams& params, std::span<const double> joint);

struct ForwardResult {
  LatentPair latents;
  Probabilities probabilities{};
};

ForwardResult forward(const ModelParams& params, const AlignedSample& sample,
                      BranchMode mode = BranchMode::multi);

/// argmax, ties go to normal (0).
int predict_label(const Probabilities& probabilities);

/// Activations kept for the backward pass.
struct ForwardTrace {
  bool valid = false;
  BranchMode mode = BranchMode::multi;
  Vector sensor_input;
  std::array<Vector, 4> sensor_pre;
  std::array<Vector, 4> sensor_act;
  std::array<Matrix, 3> lstm_inputs;
  std::array<Matrix, 3> lstm_outputs;
  std::array<LstmSequenceCache, 3> lstm_caches;
  Vector fusion_input;
  std::array<Vector, 2> fusion_pre;
  std::array<Vector, 2> fusion_act;
  Probabilities probabilities{};
};

ForwardTrace forward_trace(const ModelParams& params, const AlignedSample& sample, BranchMode mode);

/// Accumulates scale * dL/dtheta of the sample's cross-entropy term into the
/// parameter grads. Throws InvalidArgument for a trace that holds no forward pass.
void backward(ModelParams& params, const ForwardTrace& trace, int label, double scale);

/// Zeroes the grads, then fills them with the gradient of the (optionally
/// weighted) mean batch loss. Returns that loss.
double compute_gradients(ModelParams& params, std::span<const AlignedSample> batch,
                         BranchMode mode, std::span<const double> sample_weights = {});

/// Mean batch loss by forward passes only.
double batch_loss(const ModelParams& params, std::span<const AlignedSample> batch,
                  BranchMode mode, std::span<const double> sample_weights = {});

}  // namespace mmids
