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

#ifndef GRM_GENERATION_TYPES_HPP_
#define GRM_GENERATION_TYPES_HPP_

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace grm::generation {

enum class QueryVariant { kTitle, kDescription };

QueryVariant parse_query_variant(std::string_view name);

struct Topic {
  std::string qid;
  std::string text;
  QueryVariant variant = QueryVariant::kTitle;
};

// TSV "qid<TAB>query text", one topic per line. Blank lines are skipped;
// duplicate qids and empty texts are kFormat errors naming the line.
std::vector<Topic> read_topics(const std::string& path,
                               QueryVariant variant = QueryVariant::kTitle);

struct GenerationConfig {
  int k_subtopics = 5;
  int g_rounds = 10;
  double temperature = 0.7;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_length = 512;
  std::string model_name = "gpt-3.5-turbo";

  size_t pool_size() const {
    return static_cast<size_t>(k_subtopics) * static_cast<size_t>(g_rounds);
  }

  void validate() const;
};

// Identifies one generated document within all pools.
struct GenKey {
  std::string qid;
  int round = 0;
  int subtopic_index = 0;

  auto operator<=>(const GenKey&) const = default;
  bool operator==(const GenKey&) const = default;
};

std::string to_string(const GenKey& key);

struct GeneratedDocument {
  std::string qid;
  int round = 0;           // 1..G
  int subtopic_index = 0;  // 1..K
  std::string subtopic;
  std::string text;
  std::string prompt;  // the exact rendered request that produced `text`
  std::string model;

  GenKey key() const { return {qid, round, subtopic_index}; }
};

}  // namespace grm::generation

#endif  // GRM_GENERATION_TYPES_HPP_
