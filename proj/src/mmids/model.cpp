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

#include "mmids/model.hpp"

#include <algorithm>
#include <cmath>

#include "mmids/error.hpp"
#include "mmids/layers.hpp"
#include "mmids/rng.hpp"

namespace mmids {

namespace {

void dense_relu(const DenseLayer& layer, std::span<const double> in, Vector& pre, Vector& act) {
  const std::size_t out = layer.weight.value.rows();
  pre.resize(out);
  act.resize(out);
  affine(layer.weight.value, in, layer.bias.value.values(), pre);
  for (std::size_t i = 0; i < out; ++i) act[i] = std::max(0.0, pre[i]);
}

// Backward through act = relu(W in + b). Returns dL/din when wanted.
void dense_relu_backward(DenseLayer& layer, std::span<const double> in, const Vector& pre,
                         const Vector& d_act, Vector* d_in) {
  Vector d_pre(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) d_pre[i] = pre[i] > 0.0 ? d_act[i] : 0.0;
  add_outer(layer.weight.grad, d_pre, in);
  for (std::size_t i = 0; i < d_pre.size(); ++i) layer.bias.grad[i] += d_pre[i];
  if (d_in) {
    d_in->assign(in.size(), 0.0);
    add_transposed_product(layer.weight.value, d_pre, *d_in);
  }
}

void check_width(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected width " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

void glorot(SeededRng& rng, Matrix& m) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError("tensor " + name + " is " + m.shape() + ", architecture expects " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

std::string_view to_string(BranchMode mode) {
  switch (mode) {
    case BranchMode::multi:
      return "multi";
    case BranchMode::sensor_only:
      return "sensor-only";
    case BranchMode::network_only:
      return "network-only";
  }
  return "multi";
}

BranchMode parse_branch_mode(std::string_view name) {
  if (name == "multi") return BranchMode::multi;
  if (name == "sensor-only") return BranchMode::sensor_only;
  if (name == "network-only") return BranchMode::network_only;
  throw InvalidArgument("unknown modality '" + std::string(name) +
                        "' (expected multi, sensor-only or network-only)");
}

void Architecture::validate() const {
  const auto positive = [](auto widths) {
    return std::all_of(widths.begin(), widths.end(), [](std::size_t w) { return w >= 1; });
  };
  if (sensor_inputs == 0 || network_inputs == 0) {
    throw InvalidArgument("architecture: input widths must be positive");
  }
  if (!positive(sensor_widths) || !positive(lstm_hidden) || !positive(fusion_widths)) {
    throw InvalidArgument("architecture: every layer width must be at least 1");
  }
}

ModelParams ModelParams::zeros(const Architecture& arch) {
  arch.validate();
  ModelParams p;
  p.arch = arch;
  std::size_t in = arch.sensor_inputs;
  for (std::size_t l = 0; l < 4; ++l) {
    p.sensor[l] = DenseLayer(in, arch.sensor_widths[l]);
    in = arch.sensor_widths[l];
  }
  in = arch.network_inputs;
  for (std::size_t l = 0; l < 3; ++l) {
    p.lstm[l] = LstmCellParams(in, arch.lstm_hidden[l]);
    in = arch.lstm_hidden[l];
  }
  in = arch.fusion_inputs();
  for (std::size_t l = 0; l < 2; ++l) {
    p.fusion[l] = DenseLayer(in, arch.fusion_widths[l]);
    in = arch.fusion_widths[l];
  }
  p.classifier = DenseLayer(in, kClassCount);
  return p;
}

ModelParams ModelParams::initialize(const Architecture& arch, std::uint64_t seed) {
  ModelParams p = zeros(arch);
  SeededRng rng(seed);
  for (auto& [name, tensor] : p.tensors()) {
    if (name.ends_with("bias")) continue;
    glorot(rng, tensor->value);
  }
  for (auto& layer : p.lstm) {
    const std::size_t hidden = layer.hidden_size();
    for (std::size_t k = 0; k < hidden; ++k) layer.bias.value[kForgetGate * hidden + k] = 1.0;
  }
  return p;
}

std::vector<NamedTensor> ModelParams::tensors() {
  std::vector<NamedTensor> out;
  for (std::size_t l = 0; l < 4; ++l) {
    const std::string prefix = "sensor." + std::to_string(l) + ".";
    out.push_back({prefix + "weight", &sensor[l].weight});
    out.push_back({prefix + "bias", &sensor[l].bias});
  }
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string prefix = "lstm." + std::to_string(l) + ".";
    out.push_back({prefix + "input_weights", &lstm[l].input_weights});
    out.push_back({prefix + "recurrent_weights", &lstm[l].recurrent_weights});
    out.push_back({prefix + "bias", &lstm[l].bias});
  }
  for (std::size_t l = 0; l < 2; ++l) {
    const std::string prefix = "fusion." + std::to_string(l) + ".";
    out.push_back({prefix + "weight", &fusion[l].weight});
    out.push_back({prefix + "bias", &fusion[l].bias});
  }
  out.push_back({"classifier.weight", &classifier.weight});
  out.push_back({"classifier.bias", &classifier.bias});
  return out;
}

std::vector<ConstNamedTensor> ModelParams::tensors() const {
  std::vector<ConstNamedTensor> out;
  for (auto& [name, tensor] : const_cast<ModelParams*>(this)->tensors()) {
    out.push_back({name, tensor});
  }
  return out;
}

void ModelParams::zero_grads() {
  for (auto& [name, tensor] : tensors()) tensor->zero_grad();
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, tensor] : tensors()) n += tensor->value.size();
  return n;
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& [name, tensor] : tensors()) {
    const auto v = tensor->value.values();
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return flat;
}

std::vector<double> ModelParams::flatten_grads() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& [name, tensor] : tensors()) {
    const auto g = tensor->grad.values();
    flat.insert(flat.end(), g.begin(), g.end());
  }
  return flat;
}

void ModelParams::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeError("assign: expected " + std::to_string(parameter_count()) + " values, got " +
                     std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for (auto& [name, tensor] : tensors()) {
    auto v = tensor->value.values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), v.size(), v.begin());
    offset += v.size();
  }
}

void ModelParams::validate() const {
  arch.validate();
  std::size_t in = arch.sensor_inputs;
  for (std::size_t l = 0; l < 4; ++l) {
    const std::string name = "sensor." + std::to_string(l);
    check_shape(sensor[l].weight.value, arch.sensor_widths[l], in, name + ".weight");
    check_shape(sensor[l].bias.value, arch.sensor_widths[l], 1, name + ".bias");
    in = arch.sensor_widths[l];
  }
  in = arch.network_inputs;
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string name = "lstm." + std::to_string(l);
    const std::size_t h = arch.lstm_hidden[l];
    check_shape(lstm[l].input_weights.value, 4 * h, in, name + ".input_weights");
    check_shape(lstm[l].recurrent_weights.value, 4 * h, h, name + ".recurrent_weights");
    check_shape(lstm[l].bias.value, 4 * h, 1, name + ".bias");
    in = h;
  }
  in = arch.fusion_inputs();
  for (std::size_t l = 0; l < 2; ++l) {
    const std::string name = "fusion." + std::to_string(l);
    check_shape(fusion[l].weight.value, arch.fusion_widths[l], in, name + ".weight");
    check_shape(fusion[l].bias.value, arch.fusion_widths[l], 1, name + ".bias");
    in = arch.fusion_widths[l];
  }
  check_shape(classifier.weight.value, kClassCount, in, "classifier.weight");
  check_shape(classifier.bias.value, kClassCount, 1, "classifier.bias");
}

Vector sensor_encode(const ModelParams& params, std::span<const double> sensor) {
  check_width(sensor.size(), params.arch.sensor_inputs, "sensor_encode");
  Vector pre, act(sensor.begin(), sensor.end()), next;
  for (const auto& layer : params.sensor) {
    dense_relu(layer, act, pre, next);
    std::swap(act, next);
  }
  return act;
}

Vector network_encode(const ModelParams& params, const Matrix& network) {
  if (network.rows() == 0) throw InvalidArgument("network_encode: window has no time steps");
  check_width(network.cols(), params.arch.network_inputs, "network_encode");
  Matrix seq = lstm_forward_sequence(params.lstm[0], network, nullptr);
  seq = lstm_forward_sequence(params.lstm[1], seq, nullptr);
  seq = lstm_forward_sequence(params.lstm[2], seq, nullptr);
  const auto last = seq.row(seq.rows() - 1);
  return Vector(last.begin(), last.end());
}

Vector fuse(const ModelParams& params, std::span<const double> sensor_latent,
            std::span<const double> network_latent) {
  check_width(sensor_latent.size(), params.arch.sensor_latent(), "fuse (sensor latent)");
  check_width(network_latent.size(), params.arch.network_latent(), "fuse (network latent)");
  Vector act(sensor_latent.begin(), sensor_latent.end());
  act.insert(act.end(), network_latent.begin(), network_latent.end());
  Vector pre, next;
  for (const auto& layer : params.fusion) {
    dense_relu(layer, act, pre, next);
    std::swap(act, next);
  }
  return act;
}

Probabilities classify(const ModelParams& params, std::span<const double> joint) {
  check_width(joint.size(), params.arch.joint_width(), "classify");
  Vector logits(kClassCount);
  affine(params.classifier.weight.value, joint, params.classifier.bias.value.values(), logits);
  const Vector p = softmax(logits);
  return {p[0], p[1]};
}

ForwardResult forward(const ModelParams& params, const AlignedSample& sample, BranchMode mode) {
  ForwardResult out;
  auto& lat = out.latents;
  lat.sensor_latent = mode == BranchMode::network_only ? Vector(params.arch.sensor_latent(), 0.0)
                                                       : sensor_encode(params, sample.sensor);
  lat.network_latent = mode == BranchMode::sensor_only ? Vector(params.arch.network_latent(), 0.0)
                                                       : network_encode(params, sample.network);
  lat.joint = fuse(params, lat.sensor_latent, lat.network_latent);
  out.probabilities = classify(params, lat.joint);
  return out;
}

int predict_label(const Probabilities& probabilities) {
  return probabilities[1] > probabilities[0] ? 1 : 0;
}

ForwardTrace forward_trace(const ModelParams& params, const AlignedSample& sample, BranchMode mode) {
  ForwardTrace tr;
  tr.mode = mode;
  const Architecture& arch = params.arch;

  Vector sensor_latent(arch.sensor_latent(), 0.0);
  if (mode != BranchMode::network_only) {
    check_width(sample.sensor.size(), arch.sensor_inputs, "sensor_encode");
    tr.sensor_input = sample.sensor;
    std::span<const double> in = tr.sensor_input;
    for (std::size_t l = 0; l < 4; ++l) {
      dense_relu(params.sensor[l], in, tr.sensor_pre[l], tr.sensor_act[l]);
      in = tr.sensor_act[l];
    }
    sensor_latent = tr.sensor_act[3];
  }

  Vector network_latent(arch.network_latent(), 0.0);
  if (mode != BranchMode::sensor_only) {
    if (sample.network.rows() == 0) throw InvalidArgument("network_encode: window has no time steps");
    check_width(sample.network.cols(), arch.network_inputs, "network_encode");
    tr.lstm_inputs[0] = sample.network;
    for (std::size_t l = 0; l < 3; ++l) {
      tr.lstm_outputs[l] = lstm_forward_sequence(params.lstm[l], tr.lstm_inputs[l], &tr.lstm_caches[l]);
      if (l + 1 < 3) tr.lstm_inputs[l + 1] = tr.lstm_outputs[l];
    }
    const auto last = tr.lstm_outputs[2].row(tr.lstm_outputs[2].rows() - 1);
    network_latent.assign(last.begin(), last.end());
  }

  tr.fusion_input = sensor_latent;
  tr.fusion_input.insert(tr.fusion_input.end(), network_latent.begin(), network_latent.end());
  std::span<const double> in = tr.fusion_input;
  for (std::size_t l = 0; l < 2; ++l) {
    dense_relu(params.fusion[l], in, tr.fusion_pre[l], tr.fusion_act[l]);
    in = tr.fusion_act[l];
  }
  tr.probabilities = classify(params, tr.fusion_act[1]);
  tr.valid = true;
  return tr;
}

void backward(ModelParams& params, const ForwardTrace& trace, int label, double scale) {
  if (!trace.valid) throw InvalidArgument("backward called without a forward pass");
  if (label != 0 && label != 1) throw InvalidArgument("label must be 0 or 1");
  const Architecture& arch = params.arch;

  // d(BCE on p_attack)/d(logits) for a two-way softmax is p - onehot(label).
  Vector d_logits = {scale * (trace.probabilities[0] - (label == 0 ? 1.0 : 0.0)),
                     scale * (trace.probabilities[1] - (label == 1 ? 1.0 : 0.0))};
  const Vector& joint = trace.fusion_act[1];
  add_outer(params.classifier.weight.grad, d_logits, joint);
  for (std::size_t i = 0; i < kClassCount; ++i) params.classifier.bias.grad[i] += d_logits[i];
  Vector d_act(joint.size(), 0.0);
  add_transposed_product(params.classifier.weight.value, d_logits, d_act);

  Vector d_in;
  dense_relu_backward(params.fusion[1], trace.fusion_act[0], trace.fusion_pre[1], d_act, &d_in);
  d_act = std::move(d_in);
  dense_relu_backward(params.fusion[0], trace.fusion_input, trace.fusion_pre[0], d_act, &d_in);
  const Vector& d_fusion_input = d_in;

  if (trace.mode != BranchMode::network_only) {
    d_act.assign(d_fusion_input.begin(), d_fusion_input.begin() + static_cast<std::ptrdiff_t>(arch.sensor_latent()));
    for (std::size_t l = 4; l-- > 0;) {
      const std::span<const double> in =
          l == 0 ? std::span<const double>(trace.sensor_input) : std::span<const double>(trace.sensor_act[l - 1]);
      Vector d_prev;
      dense_relu_backward(params.sensor[l], in, trace.sensor_pre[l], d_act, l == 0 ? nullptr : &d_prev);
      d_act = std::move(d_prev);
    }
  }

  if (trace.mode != BranchMode::sensor_only) {
    const std::size_t steps = trace.lstm_outputs[2].rows();
    Matrix d_out(steps, arch.network_latent());
    for (std::size_t k = 0; k < arch.network_latent(); ++k) {
      d_out(steps - 1, k) = d_fusion_input[arch.sensor_latent() + k];
    }
    for (std::size_t l = 3; l-- > 0;) {
      d_out = lstm_backward_sequence(params.lstm[l], trace.lstm_inputs[l], trace.lstm_outputs[l],
                                     trace.lstm_caches[l], d_out);
    }
  }
}

double compute_gradients(ModelParams& params, std::span<const AlignedSample> batch,
                         BranchMode mode, std::span<const double> sample_weights) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  if (!sample_weights.empty() && sample_weights.size() != batch.size()) {
    throw InvalidArgument("sample weight count does not match batch size");
  }
  params.zero_grads();
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double w = sample_weights.empty() ? 1.0 : sample_weights[i];
    const ForwardTrace tr = forward_trace(params, batch[i], mode);
    total += w * bce_term(batch[i].label, tr.probabilities[1]);
    backward(params, tr, batch[i].label, w * inv);
  }
  return total * inv;
}

double batch_loss(const ModelParams& params, std::span<const AlignedSample> batch,
                  BranchMode mode, std::span<const double> sample_weights) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double w = sample_weights.empty() ? 1.0 : sample_weights[i];
    total += w * bce_term(batch[i].label, forward(params, batch[i], mode).probabilities[1]);
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace mmids
