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

#include "grm/generation/generator.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include <json.hpp>

#include "grm/error.hpp"
#include "grm/log.hpp"

namespace grm::generation {

using nlohmann::json;

namespace {

constexpr std::string_view kSubtopicSystem =
    "You are a research assistant who breaks complex information needs into distinct, "
    "non-overlapping subtopics.";

constexpr std::string_view kSubtopicExemplar =
    "Query: Why is deep-sea mining controversial?\n"
    "Reasoning: The debate involves damage to seabed habitats, who owns and regulates the "
    "ocean floor, the metals demanded by battery makers, how little is known about these "
    "ecosystems, and what the work means for coastal economies.\n"
    "Subtopics:\n"
    "1. Habitat destruction\n"
    "2. International seabed regulation\n"
    "3. Battery metal demand\n"
    "4. Scientific uncertainty\n"
    "5. Coastal economic impact";

constexpr std::string_view kDocumentSystem =
    "You write factual, informative passages in the style of a news or reference article.";

SamplingParams sampling(const GenerationConfig& config) {
  return {config.temperature, config.top_p, config.frequency_penalty, config.presence_penalty,
          config.max_length};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Item text after a list marker, or nullopt if the line carries none.
std::optional<std::string> list_item(std::string_view line) {
  const std::string t = trim(line);
  if (t.empty()) return std::nullopt;
  if (t[0] == '-') return trim(std::string_view(t).substr(1));
  size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i == 0 || i >= t.size()) return std::nullopt;
  if (t[i] != '.' && t[i] != ')') return std::nullopt;
  return trim(std::string_view(t).substr(i + 1));
}

// Keeps the first `max_tokens` whitespace-delimited tokens, preserving the
// original spacing between them.
std::string cap_tokens(const std::string& text, int max_tokens) {
  int tokens = 0;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    if (tokens == max_tokens) return trim(std::string_view(text).substr(0, i));
    ++tokens;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  }
  return text;
}

std::string wrap_provider_error(const std::string& qid, const std::exception& e) {
  return "generation failed for qid " + qid + ": " + e.what();
}

}  // namespace

ChatRequest subtopic_request(const Topic& topic, const GenerationConfig& config, int round) {
  ChatRequest r;
  r.model = config.model_name;
  r.params = sampling(config);
  r.round = round;
  std::string user = "Identify " + std::to_string(config.k_subtopics) +
                     " distinct subtopics of the query. First reason briefly about the different "
                     "aspects a complete answer must cover. Then write a line \"Subtopics:\" "
                     "followed by a numbered list of exactly " +
                     std::to_string(config.k_subtopics) + " short subtopic phrases.\n\n";
  user += kSubtopicExemplar;
  user += "\n\nQuery: " + topic.text + "\nReasoning:";
  r.messages = {{"system", std::string(kSubtopicSystem)}, {"user", std::move(user)}};
  return r;
}

ChatRequest document_request(const Topic& topic, std::string_view subtopic,
                             const GenerationConfig& config, int round) {
  ChatRequest r;
  r.model = config.model_name;
  r.params = sampling(config);
  r.round = round;
  std::string user = "Query: " + topic.text + "\nSubtopic: " + std::string(subtopic) +
                     "\n\nWrite a passage that is relevant to the query and focuses on the "
                     "subtopic. Include specific facts, names and terminology a relevant "
                     "document would contain.";
  r.messages = {{"system", std::string(kDocumentSystem)}, {"user", std::move(user)}};
  return r;
}

std::vector<std::string> parse_subtopics(std::string_view completion, int k) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= completion.size()) {
    const size_t end = completion.find('\n', start);
    lines.push_back(completion.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                            : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  size_t first = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lower(trim(lines[i])).starts_with("subtopics:")) first = i + 1;
  }
  std::vector<std::string> items;
  for (size_t i = first; i < lines.size() && static_cast<int>(items.size()) < k; ++i) {
    if (auto item = list_item(lines[i]); item && !item->empty()) items.push_back(std::move(*item));
  }
  if (static_cast<int>(items.size()) < k) {
    fail(ErrorCategory::kFormat, "expected " + std::to_string(k) + " subtopics, parsed " +
                                     std::to_string(items.size()) + "; raw completion: " +
                                     std::string(completion));
  }
  return items;
}

std::vector<std::string> generate_subtopics(const Topic& topic, const GenerationConfig& config,
                                            ChatProvider& provider, int round) {
  const auto request = subtopic_request(topic, config, round);
  std::string completion;
  try {
    completion = provider.complete(request);
  } catch (const std::exception& e) {
    fail(ErrorCategory::kGeneration, wrap_provider_error(topic.qid, e));
  }
  try {
    return parse_subtopics(completion, config.k_subtopics);
  } catch (const Error& e) {
    fail(ErrorCategory::kFormat, "qid " + topic.qid + " round " + std::to_string(round) + ": " + e.what());
  }
}

GeneratedDocument generate_document(const Topic& topic, std::string_view subtopic, int round,
                                    int subtopic_index, const GenerationConfig& config,
                                    ChatProvider& provider) {
  if (trim(subtopic).empty()) fail(ErrorCategory::kInvalidArgument, "empty subtopic for qid " + topic.qid);
  const auto request = document_request(topic, subtopic, config, round);
  std::string completion;
  try {
    completion = provider.complete(request);
  } catch (const std::exception& e) {
    fail(ErrorCategory::kGeneration, wrap_provider_error(topic.qid, e));
  }
  std::string text = cap_tokens(trim(completion), config.max_length);
  if (text.empty()) {
    fail(ErrorCategory::kGeneration, "empty completion for qid " + topic.qid + " round " +
                                         std::to_string(round) + " subtopic " +
                                         std::to_string(subtopic_index));
  }
  GeneratedDocument doc;
  doc.qid = topic.qid;
  doc.round = round;
  doc.subtopic_index = subtopic_index;
  doc.subtopic = std::string(subtopic);
  doc.text = std::move(text);
  doc.prompt = request.rendered();
  doc.model = config.model_name;
  return doc;
}

// ---------------------------------------------------------------------------

std::string pool_record_line(const GeneratedDocument& doc) {
  const json rec{{"qid", doc.qid},           {"round", doc.round},   {"subtopic_index", doc.subtopic_index},
                 {"subtopic", doc.subtopic}, {"text", doc.text},     {"prompt", doc.prompt},
                 {"model", doc.model}};
  return rec.dump();
}

namespace {

GeneratedDocument parse_pool_record(const std::string& line, const std::string& where) {
  try {
    const json rec = json::parse(line);
    GeneratedDocument d;
    d.qid = rec.at("qid").get<std::string>();
    d.round = rec.at("round").get<int>();
    d.subtopic_index = rec.at("subtopic_index").get<int>();
    d.subtopic = rec.at("subtopic").get<std::string>();
    d.text = rec.at("text").get<std::string>();
    d.prompt = rec.value("prompt", "");
    d.model = rec.value("model", "");
    if (d.qid.empty() || d.round < 1 || d.subtopic_index < 1 || d.text.empty()) {
      fail(ErrorCategory::kFormat, where + ": invalid pool record");
    }
    return d;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kFormat, where + ": " + e.what());
  }
}

template <typename Fn>
void scan_pool_file(const std::string& path, bool must_exist, Fn&& on_doc) {
  std::ifstream in(path);
  if (!in) {
    if (must_exist) fail(ErrorCategory::kIo, "cannot open pool file: " + path);
    return;
  }
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    on_doc(parse_pool_record(line, path + ":" + std::to_string(line_no)), line_no);
  }
}

}  // namespace

std::vector<GeneratedDocument> read_pool_file(const std::string& path) {
  std::vector<GeneratedDocument> docs;
  std::set<GenKey> seen;
  scan_pool_file(path, true, [&](GeneratedDocument&& d, size_t line_no) {
    if (!seen.insert(d.key()).second) {
      fail(ErrorCategory::kFormat,
           path + ":" + std::to_string(line_no) + ": duplicate pool entry " + to_string(d.key()));
    }
    docs.push_back(std::move(d));
  });
  return docs;
}

PoolCache::PoolCache(const std::string& path) : path_(path) {
  scan_pool_file(path, false, [&](GeneratedDocument&& d, size_t line_no) {
    const auto key = d.key();
    if (!docs_.emplace(key, std::move(d)).second) {
      fail(ErrorCategory::kFormat,
           path + ":" + std::to_string(line_no) + ": duplicate pool entry " + to_string(key));
    }
  });
  out_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*out_) fail(ErrorCategory::kIo, "cannot append to pool file: " + path);
}

std::vector<GeneratedDocument> PoolCache::documents(const std::string& qid) const {
  std::vector<GeneratedDocument> out;
  for (auto it = docs_.lower_bound(GenKey{qid, 0, 0}); it != docs_.end() && it->first.qid == qid; ++it) {
    out.push_back(it->second);
  }
  return out;
}

void PoolCache::append(const GeneratedDocument& doc) {
  if (!docs_.emplace(doc.key(), doc).second) {
    fail(ErrorCategory::kInvalidArgument, "pool already contains " + to_string(doc.key()));
  }
  if (out_) {
    *out_ << pool_record_line(doc) << '\n';
    out_->flush();
    if (!*out_) fail(ErrorCategory::kIo, "failed writing pool file: " + path_);
  }
}

std::vector<GeneratedDocument> generate_pool(const Topic& topic, const GenerationConfig& config,
                                             ChatProvider& provider, PoolCache* cache) {
  config.validate();
  PoolCache scratch;
  PoolCache& pool = cache != nullptr ? *cache : scratch;
  for (int round = 1; round <= config.g_rounds; ++round) {
    std::vector<int> missing;
    for (int i = 1; i <= config.k_subtopics; ++i) {
      if (!pool.contains({topic.qid, round, i})) missing.push_back(i);
    }
    if (missing.empty()) continue;
    const auto subtopics = generate_subtopics(topic, config, provider, round);
    for (int i : missing) {
      pool.append(generate_document(topic, subtopics[static_cast<size_t>(i - 1)], round, i, config, provider));
    }
  }
  std::vector<GeneratedDocument> out;
  for (auto& d : pool.documents(topic.qid)) {
    if (d.round <= config.g_rounds && d.subtopic_index <= config.k_subtopics) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace grm::generation
