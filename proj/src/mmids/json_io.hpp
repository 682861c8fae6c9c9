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

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>

#include "json.hpp"

#include "mmids/error.hpp"

namespace mmids {

/// Parses a JSON file; DataError if it is missing or malformed.
nlohmann::ordered_json read_json_file(const std::filesystem::path& path);

/// Writes `doc` pretty-printed with a trailing newline.
void write_json_file(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

/// Writes `text` to `path` verbatim (binary mode).
void write_text_file(const std::string& text, const std::filesystem::path& path);

/// Throws InvalidArgument naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const nlohmann::ordered_json& obj,
                         std::initializer_list<std::string_view> allowed, std::string_view context);

/// True for integers >= 0, whether parsed from text or built in code.
inline bool is_nonnegative_integer(const nlohmann::ordered_json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

/// Reads obj[key] into `out` if present, leaving the default otherwise. Types
/// are checked strictly: a negative number never lands in an unsigned field.
template <typename T>
void read_optional(const nlohmann::ordered_json& obj, const std::string& key, T& out,
                   std::string_view context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) {
    ok = it->is_boolean();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    ok = is_nonnegative_integer(*it);
  } else if constexpr (std::is_integral_v<T>) {
    ok = it->is_number_integer();
  } else if constexpr (std::is_floating_point_v<T>) {
    ok = it->is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = it->is_string();
  } else {
    ok = true;
  }
  if (ok) {
    try {
      out = it->template get<T>();
      return;
    } catch (const nlohmann::json::exception&) {
    }
  }
  throw InvalidArgument("'" + key + "' in " + std::string(context) + " has the wrong type");
}

}  // namespace mmids
