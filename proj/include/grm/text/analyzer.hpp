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

#ifndef GRM_TEXT_ANALYZER_HPP_
#define GRM_TEXT_ANALYZER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace grm::text {

enum class StemmerKind { kNone = 0, kPorter = 1 };

std::string_view stemmer_name(StemmerKind kind);
StemmerKind parse_stemmer(std::string_view name);

struct AnalyzerConfig {
  // Lowercase terms; kept sorted and unique by `normalized()`.
  std::vector<std::string> stopwords;
  StemmerKind stemmer = StemmerKind::kPorter;
  bool lowercase = true;

  // The 33-term English IR stopword list with Porter stemming.
  static AnalyzerConfig english_default();

  AnalyzerConfig normalized() const;

  // Stable FNV-1a fingerprint of the normalized configuration. Stored in index
  // files so that a query-side analyzer can be checked against the one used at
  // build time.
  uint64_t fingerprint() const;
};

const std::vector<std::string>& english_stopwords();

// One term per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> load_stopword_file(const std::string& path);

class Analyzer {
 public:
  explicit Analyzer(AnalyzerConfig config = AnalyzerConfig::english_default());

  // Splits on every non-alphanumeric ASCII byte, lowercases, drops stopwords,
  // then stems. Deterministic.
  std::vector<std::string> analyze(std::string_view text) const;

  const AnalyzerConfig& config() const { return config_; }

 private:
  AnalyzerConfig config_;
  std::unordered_set<std::string> stopword_set_;
};

uint64_t fnv1a64(std::string_view data, uint64_t seed = 14695981039346656037ULL);

}  // namespace grm::text

#endif  // GRM_TEXT_ANALYZER_HPP_
