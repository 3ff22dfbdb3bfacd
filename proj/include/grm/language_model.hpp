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

#ifndef GRM_LANGUAGE_MODEL_HPP_
#define GRM_LANGUAGE_MODEL_HPP_

#include <functional>
#include <map>
#include <span>
#include <string>

namespace grm {

// Term -> probability. Ordered so that iteration (and therefore floating-point
// summation) is deterministic.
using LanguageModel = std::map<std::string, double, std::less<>>;

// tf(w) / |tokens|. Empty input gives an empty model.
LanguageModel maximum_likelihood(std::span<const std::string> tokens);

double total_mass(const LanguageModel& model);

}  // namespace grm

#endif  // GRM_LANGUAGE_MODEL_HPP_
