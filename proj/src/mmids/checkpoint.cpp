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

#include "mmids/checkpoint.hpp"

#include <cmath>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"

namespace mmids {

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& checkpoint) {
  checkpoint.params.validate();
  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  for (const auto& [name, tensor] : checkpoint.params.tensors()) {
    const Matrix& m = tensor->value;
    tensors[name] = {{"shape", {m.rows(), m.cols()}},
                     {"values", std::vector<double>(m.values().begin(), m.values().end())}};
  }
  return {{"format_version", kCheckpointFormatVersion},
          {"config", train_config_to_json(checkpoint.config)},
          {"metadata", checkpoint.metadata},
          {"tensors", std::move(tensors)}};
}

Checkpoint checkpoint_from_json(const nlohmann::ordered_json& doc) {
  Checkpoint out;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw DataError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointFormatVersion) + ")");
    }
    try {
      out.config = train_config_from_json(doc.at("config"));
    } catch (const InvalidArgument& e) {
      throw DataError(std::string("checkpoint config: ") + e.what());
    }
    out.metadata = doc.value("metadata", nlohmann::ordered_json::object());
    out.params = ModelParams::zeros(out.config.arch);

    const auto& tensors = doc.at("tensors");
    if (tensors.size() != out.params.tensors().size()) {
      throw DataError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, expected " +
                      std::to_string(out.params.tensors().size()));
    }
    for (auto& [name, tensor] : out.params.tensors()) {
      if (!tensors.contains(name)) throw DataError("checkpoint is missing tensor " + name);
      const auto& entry = tensors.at(name);
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      auto values = entry.at("values").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != tensor->value.rows() || shape[1] != tensor->value.cols()) {
        throw DataError("tensor " + name + " has shape inconsistent with the checkpoint config (expected " +
                        tensor->value.shape() + ")");
      }
      if (values.size() != shape[0] * shape[1]) {
        throw DataError("tensor " + name + " holds " + std::to_string(values.size()) + " values for shape " +
                        tensor->value.shape());
      }
      for (double v : values) {
        if (!std::isfinite(v)) throw DataError("tensor " + name + " contains a non-finite value");
      }
      *tensor = ParamTensor(Matrix(shape[0], shape[1], std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  return out;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_json_file(checkpoint_to_json(checkpoint), path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return checkpoint_from_json(read_json_file(path));
  } catch (const DataError& e) {
    const std::string what = e.what();
    if (what.starts_with(path.string())) throw;
    throw DataError(path.string() + ": " + what);
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Architecture& expected) {
  Checkpoint c = load_checkpoint(path);
  if (!(c.config.arch == expected)) {
    const auto& a = c.config.arch;
    throw DataError(path.string() + ": checkpoint widths (sensor " + std::to_string(a.sensor_inputs) + "->" +
                    std::to_string(a.sensor_widths[0]) + "..., lstm " + std::to_string(a.lstm_hidden[0]) +
                    "...) do not match the configured architecture (sensor " +
                    std::to_string(expected.sensor_inputs) + "->" + std::to_string(expected.sensor_widths[0]) +
                    "..., lstm " + std::to_string(expected.lstm_hidden[0]) + "...)");
  }
  return c;
}

}  // namespace mmids
