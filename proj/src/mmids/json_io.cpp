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

#include "mmids/json_io.hpp"

#include <fstream>
#include <sstream>

#include "mmids/error.hpp"

namespace mmids {

nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::ordered_json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw DataError(path.string() + ": write failed");
}

void write_json_file(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
  write_text_file(doc.dump(2) + "\n", path);
}

void reject_unknown_keys(const nlohmann::ordered_json& obj,
                         std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!obj.is_object()) throw InvalidArgument(std::string(context) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) throw InvalidArgument("unknown key '" + key + "' in " + std::string(context));
  }
}

}  // namespace mmids
