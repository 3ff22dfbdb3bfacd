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

#include "grm/generation/types.hpp"

#include <fstream>
#include <set>

#include "grm/error.hpp"

namespace grm::generation {

QueryVariant parse_query_variant(std::string_view name) {
  if (name == "title") return QueryVariant::kTitle;
  if (name == "description") return QueryVariant::kDescription;
  fail(ErrorCategory::kConfig,
       "unknown topic variant '" + std::string(name) + "' (expected title|description)");
}

std::vector<Topic> read_topics(const std::string& path, QueryVariant variant) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open topics file: " + path);
  std::vector<Topic> topics;
  std::set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorCategory::kFormat, where + ": expected qid<TAB>query");
    Topic t{line.substr(0, tab), line.substr(tab + 1), variant};
    if (t.qid.empty()) fail(ErrorCategory::kFormat, where + ": empty qid");
    if (t.text.find_first_not_of(" \t") == std::string::npos) {
      fail(ErrorCategory::kFormat, where + ": empty query text for qid " + t.qid);
    }
    if (!seen.insert(t.qid).second) fail(ErrorCategory::kFormat, where + ": duplicate qid " + t.qid);
    topics.push_back(std::move(t));
  }
  return topics;
}

void GenerationConfig::validate() const {
  if (k_subtopics < 1) fail(ErrorCategory::kConfig, "generation.k_subtopics must be >= 1");
  if (g_rounds < 1) fail(ErrorCategory::kConfig, "generation.g_rounds must be >= 1");
  if (max_length < 1) fail(ErrorCategory::kConfig, "generation.max_length must be >= 1");
  if (temperature < 0.0) fail(ErrorCategory::kConfig, "generation.temperature must be >= 0");
  if (top_p <= 0.0 || top_p > 1.0) fail(ErrorCategory::kConfig, "generation.top_p must be in (0, 1]");
  if (model_name.empty()) fail(ErrorCategory::kConfig, "generation.model must be non-empty");
}

std::string to_string(const GenKey& key) {
  return key.qid + "/r" + std::to_string(key.round) + "/s" + std::to_string(key.subtopic_index);
}

}  // namespace grm::generation
