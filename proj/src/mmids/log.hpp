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

#include <functional>
#include <string_view>

namespace mmids {

enum class LogLevel { info = 0, warning = 1 };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink. An empty sink restores the default, which
/// writes warnings to stderr and drops info messages.
void set_log_sink(LogSink sink);

void log_message(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log_message(LogLevel::warning, message); }
inline void log_info(std::string_view message) { log_message(LogLevel::info, message); }

}  // namespace mmids
