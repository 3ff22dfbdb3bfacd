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

#ifndef GRM_ERROR_HPP_
#define GRM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace grm {

// Broad failure classes. They map one-to-one onto the C API status codes and
// onto the category word the CLI prints on failure.
enum class ErrorCategory {
  kInvalidArgument,
  kConfig,
  kIo,
  kFormat,
  kNotFound,
  kGeneration,
  kPipeline,
  kInternal,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace grm

#endif  // GRM_ERROR_HPP_
