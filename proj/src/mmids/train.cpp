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

#include "mmids/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"
#include "mmids/log.hpp"
#include "mmids/rng.hpp"
#include "mmids/table.hpp"

namespace mmids {

namespace {

template <std::size_t N>
nlohmann::ordered_json widths_json(const std::array<std::size_t, N>& w) {
  return nlohmann::ordered_json(std::vector<std::size_t>(w.begin(), w.end()));
}

template <std::size_t N>
void read_widths(const nlohmann::ordered_json& doc, const std::string& key,
                 std::array<std::size_t, N>& out) {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  if (!it->is_array() || it->size() != N) {
    throw InvalidArgument("'" + key + "' must be an array of " + std::to_string(N) + " widths");
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!is_nonnegative_integer((*it)[i])) {
      throw InvalidArgument("'" + key + "' entries must be positive integers");
    }
    out[i] = (*it)[i].template get<std::size_t>();
  }
}

bool all_finite_grads(const ModelParams& params) {
  for (const auto& [name, tensor] : params.tensors()) {
    if (!tensor->grad.all_finite()) return false;
  }
  return true;
}

bool all_finite_values(const ModelParams& params) {
  for (const auto& [name, tensor] : params.tensors()) {
    if (!tensor->value.all_finite()) return false;
  }
  return true;
}

}  // namespace

void TrainConfig::validate() const {
  arch.validate();
  optimizer.validate();
  if (window == 0) throw InvalidArgument("window must be at least 1");
  if (batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
  return {{"sensor_inputs", c.arch.sensor_inputs},
          {"network_inputs", c.arch.network_inputs},
          {"sensor_widths", widths_json(c.arch.sensor_widths)},
          {"lstm_hidden", widths_json(c.arch.lstm_hidden)},
          {"fusion_widths", widths_json(c.arch.fusion_widths)},
          {"window", c.window},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"optimizer", std::string(to_string(c.optimizer.kind))},
          {"learning_rate", c.optimizer.learning_rate},
          {"beta1", c.optimizer.beta1},
          {"beta2", c.optimizer.beta2},
          {"epsilon", c.optimizer.epsilon},
          {"seed", c.seed},
          {"train_fraction", c.train_fraction},
          {"class_weighting", c.class_weighting},
          {"modality", std::string(to_string(c.mode))}};
}

TrainConfig train_config_from_json(const nlohmann::ordered_json& doc) {
  constexpr std::string_view ctx = "train config";
  reject_unknown_keys(doc,
                      {"sensor_inputs", "network_inputs", "sensor_widths", "lstm_hidden",
                       "fusion_widths", "window", "epochs", "batch_size", "optimizer",
                       "learning_rate", "beta1", "beta2", "epsilon", "seed", "train_fraction",
                       "class_weighting", "modality"},
                      ctx);
  TrainConfig c;
  read_optional(doc, "sensor_inputs", c.arch.sensor_inputs, ctx);
  read_optional(doc, "network_inputs", c.arch.network_inputs, ctx);
  read_widths(doc, "sensor_widths", c.arch.sensor_widths);
  read_widths(doc, "lstm_hidden", c.arch.lstm_hidden);
  read_widths(doc, "fusion_widths", c.arch.fusion_widths);
  read_optional(doc, "window", c.window, ctx);
  read_optional(doc, "epochs", c.epochs, ctx);
  read_optional(doc, "batch_size", c.batch_size, ctx);
  std::string optimizer(to_string(c.optimizer.kind));
  read_optional(doc, "optimizer", optimizer, ctx);
  c.optimizer.kind = parse_optimizer_kind(optimizer);
  read_optional(doc, "learning_rate", c.optimizer.learning_rate, ctx);
  read_optional(doc, "beta1", c.optimizer.beta1, ctx);
  read_optional(doc, "beta2", c.optimizer.beta2, ctx);
  read_optional(doc, "epsilon", c.optimizer.epsilon, ctx);
  read_optional(doc, "seed", c.seed, ctx);
  read_optional(doc, "train_fraction", c.train_fraction, ctx);
  read_optional(doc, "class_weighting", c.class_weighting, ctx);
  std::string mode(to_string(c.mode));
  read_optional(doc, "modality", mode, ctx);
  c.mode = parse_branch_mode(mode);
  c.validate();
  return c;
}

std::uint64_t batch_order_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

TrainResult train(const TrainConfig& config, std::span<const AlignedSample> samples) {
  config.validate();
  return train_from(config, ModelParams::initialize(config.arch, config.seed), samples);
}

TrainResult train_from(const TrainConfig& config, ModelParams initial,
                       std::span<const AlignedSample> samples) {
  config.validate();
  if (samples.empty()) throw InvalidArgument("training set is empty");
  initial.validate();

  TrainResult result{std::move(initial), {}};
  ModelParams& params = result.params;
  Optimizer optimizer(config.optimizer);
  std::vector<ParamTensor*> tensors;
  for (auto& [name, tensor] : params.tensors()) tensors.push_back(tensor);

  const std::size_t m = samples.size();
  std::vector<double> class_weight(2, 1.0);
  if (config.class_weighting) {
    std::size_t attacks = 0;
    for (const auto& s : samples) attacks += s.label == 1 ? 1 : 0;
    const std::size_t counts[2] = {m - attacks, attacks};
    for (int c = 0; c < 2; ++c) {
      if (counts[c] > 0) class_weight[c] = static_cast<double>(m) / (2.0 * static_cast<double>(counts[c]));
    }
  }

  SeededRng order_rng(batch_order_seed(config.seed));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<AlignedSample> batch;
  std::vector<double> weights;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double epoch_total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < m; start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(m, start + config.batch_size);
      batch.clear();
      weights.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(samples[order[i]]);
        weights.push_back(class_weight[static_cast<std::size_t>(samples[order[i]].label)]);
      }
      const double loss = compute_gradients(params, batch, config.mode, weights);
      if (!std::isfinite(loss) || !all_finite_grads(params)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                             std::to_string(batch_index + 1));
      }
      optimizer.step(tensors);
      if (!all_finite_values(params)) {
        throw NumericalError("non-finite parameters after the update at epoch " + std::to_string(epoch + 1) +
                             ", batch " + std::to_string(batch_index + 1));
      }
      epoch_total += loss * static_cast<double>(end - start);
    }
    result.epoch_losses.push_back(epoch_total / static_cast<double>(m));
    log_info("epoch " + std::to_string(epoch + 1) + "/" + std::to_string(config.epochs) + " loss " +
             format_double(result.epoch_losses.back()));
  }
  return result;
}

}  // namespace mmids
