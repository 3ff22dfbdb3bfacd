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

#ifndef GRM_APP_CONFIG_HPP_
#define GRM_APP_CONFIG_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grm/app/pipeline.hpp"
#include "grm/generation/types.hpp"
#include "grm/text/analyzer.hpp"

namespace grm::app {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

// Every key the configuration accepts, in documentation order.
const std::vector<ConfigKey>& config_keys();

// Raw key=value settings. Lines are "key = value"; blank lines and lines
// starting with '#' are ignored. Later assignments win, so flags applied with
// set() after load override the file.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(std::string_view text, const std::string& source);

  // Throws kConfig for an unknown key.
  void set(const std::string& key, const std::string& value);
  // The explicit value, else the key's default. Throws kConfig for an
  // unknown key.
  std::string get(const std::string& key) const;
  bool has(const std::string& key) const { return values_.contains(key); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class ProviderKind { kReplay, kLive };

// Typed, fully validated view of a Config.
struct Settings {
  std::string corpus_path;
  std::string corpus_format = "auto";
  std::string index_path;
  std::string topics_path;
  generation::QueryVariant query_variant = generation::QueryVariant::kTitle;
  std::string qrels_path;
  std::string folds_path;
  text::AnalyzerConfig analyzer = text::AnalyzerConfig::english_default();

  RunSettings run;

  generation::GenerationConfig generation;
  ProviderKind provider = ProviderKind::kReplay;
  std::string completions_path;
  std::string pool_path;
  std::string base_url;
  int min_interval_ms = 200;
  int max_retries = 5;

  std::string scores_path;
  std::string scorer_url;

  std::string tune_grid;  // "name=values;name=values", empty = standard grid
  std::string output_path;
  int threads = 1;

  // Throws kConfig naming `key` when it is required but empty.
  static const std::string& require(const std::string& value, std::string_view key);
};

// Parses and validates every key. Errors name the offending key.
Settings resolve(const Config& config);

}  // namespace grm::app

#endif  // GRM_APP_CONFIG_HPP_
