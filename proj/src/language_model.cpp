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

#include "grm/language_model.hpp"

namespace grm {

LanguageModel maximum_likelihood(std::span<const std::string> tokens) {
  LanguageModel model;
  if (tokens.empty()) return model;
  std::map<std::string, size_t, std::less<>> counts;
  for (const auto& t : tokens) ++counts[t];
  const double n = static_cast<double>(tokens.size());
  for (const auto& [term, count] : counts) {
    model.emplace(term, static_cast<double>(count) / n);
  }
  return model;
}

double total_mass(const LanguageModel& model) {
  double sum = 0.0;
  for (const auto& [term, p] : model) sum += p;
  return sum;
}

}  // namespace grm
