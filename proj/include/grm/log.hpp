/*
 * Copyright 2026 The GRM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRM_LOG_HPP_
#define GRM_LOG_HPP_

#include <functional>
#include <string>

namespace grm {

enum class LogLevel { kInfo = 0, kWarning = 1 };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Replaces the process-wide sink. Passing an empty function restores the
// default, which writes warnings to stderr and drops info messages.
void set_log_sink(LogSink sink);

void log_info(const std::string& message);
void log_warning(const std::string& message);

}  // namespace grm

#endif  // GRM_LOG_HPP_
