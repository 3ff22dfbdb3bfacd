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

#ifndef GRM_GENERATION_GENERATOR_HPP_
#define GRM_GENERATION_GENERATOR_HPP_

#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "grm/generation/chat_provider.hpp"
#include "grm/generation/types.hpp"

namespace grm::generation {

// Prompt templates. The subtopic prompt carries one worked exemplar and asks
// for brief reasoning before a "Subtopics:" numbered list.
ChatRequest subtopic_request(const Topic& topic, const GenerationConfig& config, int round);
ChatRequest document_request(const Topic& topic, std::string_view subtopic,
                             const GenerationConfig& config, int round);

// Extracts list items marked "N.", "N)" or "-" (whitespace trimmed). When the
// completion contains a "Subtopics:" header line only the lines after the last
// such header are considered. Returns the first `k` items; fewer than `k` is a
// kFormat error whose message includes the raw completion.
std::vector<std::string> parse_subtopics(std::string_view completion, int k);

std::vector<std::string> generate_subtopics(const Topic& topic, const GenerationConfig& config,
                                            ChatProvider& provider, int round = 1);

GeneratedDocument generate_document(const Topic& topic, std::string_view subtopic, int round,
                                    int subtopic_index, const GenerationConfig& config,
                                    ChatProvider& provider);

// JSONL pool cache, one GeneratedDocument per line:
//   {"qid", "round", "subtopic_index", "subtopic", "text", "prompt", "model"}.
// Appends are flushed line by line so an interrupted generation keeps every
// finished document.
class PoolCache {
 public:
  PoolCache() = default;
  // Loads existing records (if the file exists) and opens it for appending.
  explicit PoolCache(const std::string& path);

  std::vector<GeneratedDocument> documents(const std::string& qid) const;
  bool contains(const GenKey& key) const { return docs_.contains(key); }
  size_t size() const { return docs_.size(); }

  void append(const GeneratedDocument& doc);

 private:
  std::string path_;
  std::map<GenKey, GeneratedDocument> docs_;
  std::unique_ptr<std::ofstream> out_;
};

std::string pool_record_line(const GeneratedDocument& doc);

// Every record of a pool file, in file order. Duplicate keys are kFormat.
std::vector<GeneratedDocument> read_pool_file(const std::string& path);

// K x G documents for one topic. Round r issues its own subtopic request, then
// one document request per subtopic. Documents already in `cache` are reused,
// new ones are appended as they are produced. The result is ordered by
// (round, subtopic_index). Provider failures surface as kGeneration errors
// naming the qid; finished documents stay in the cache.
std::vector<GeneratedDocument> generate_pool(const Topic& topic, const GenerationConfig& config,
                                             ChatProvider& provider, PoolCache* cache = nullptr);

}  // namespace grm::generation

#endif  // GRM_GENERATION_GENERATOR_HPP_
