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

#include "grm/text/analyzer.hpp"

#include <algorithm>
#include <fstream>

#include "grm/error.hpp"
#include "grm/text/porter_stemmer.hpp"

namespace grm::text {

std::string_view stemmer_name(StemmerKind kind) {
  return kind == StemmerKind::kPorter ? "porter" : "none";
}

StemmerKind parse_stemmer(std::string_view name) {
  if (name == "porter") return StemmerKind::kPorter;
  if (name == "none") return StemmerKind::kNone;
  fail(ErrorCategory::kConfig, "unknown stemmer '" + std::string(name) + "' (expected porter|none)");
}

const std::vector<std::string>& english_stopwords() {
  static const std::vector<std::string> kList = {
      "a",    "an",   "and",   "are",   "as",    "at",   "be",    "but",  "by",
      "for",  "if",   "in",    "into",  "is",    "it",   "no",    "not",  "of",
      "on",   "or",   "such",  "that",  "the",   "their", "then", "there", "these",
      "they", "this", "to",    "was",   "will",  "with"};
  return kList;
}

AnalyzerConfig AnalyzerConfig::english_default() {
  AnalyzerConfig config;
  config.stopwords = english_stopwords();
  config.stemmer = StemmerKind::kPorter;
  return config.normalized();
}

AnalyzerConfig AnalyzerConfig::normalized() const {
  AnalyzerConfig out = *this;
  for (auto& w : out.stopwords) {
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  std::sort(out.stopwords.begin(), out.stopwords.end());
  out.stopwords.erase(std::unique(out.stopwords.begin(), out.stopwords.end()),
                      out.stopwords.end());
  return out;
}

uint64_t fnv1a64(std::string_view data, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t AnalyzerConfig::fingerprint() const {
  const AnalyzerConfig n = normalized();
  std::string canonical = "stemmer=";
  canonical += stemmer_name(n.stemmer);
  canonical += n.lowercase ? "\nlowercase=1\n" : "\nlowercase=0\n";
  for (const auto& w : n.stopwords) {
    canonical += w;
    canonical += '\n';
  }
  return fnv1a64(canonical);
}

std::vector<std::string> load_stopword_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open stopword file: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  return words;
}

Analyzer::Analyzer(AnalyzerConfig config)
    : config_(config.normalized()),
      stopword_set_(config_.stopwords.begin(), config_.stopwords.end()) {}

std::vector<std::string> Analyzer::analyze(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!stopword_set_.contains(current)) {
      if (config_.stemmer == StemmerKind::kPorter) {
        tokens.push_back(porter_stem(current));
      } else {
        tokens.push_back(current);
      }
    }
    current.clear();
  };
  for (unsigned char c : text) {
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(config_.lowercase ? static_cast<char>(std::tolower(c))
                                          : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace grm::text
