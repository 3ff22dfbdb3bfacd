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

#include "grm/app/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "grm/error.hpp"

namespace grm::app {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"corpus.path", "", "document collection (JSONL or TREC text)"},
      {"corpus.format", "auto", "auto | jsonl | trectext"},
      {"index.path", "", "index file written by 'index' and read by the other commands"},
      {"topics.path", "", "TSV qid<TAB>query"},
      {"topics.variant", "title", "title | description"},
      {"qrels.path", "", "TREC qrels"},
      {"folds.path", "", "JSON object of fold id -> qids"},
      {"analyzer.stopwords", "default", "default | none | path to a stopword file"},
      {"analyzer.stemmer", "porter", "porter | none"},
      {"bm25.k1", "0.9", ""},
      {"bm25.b", "0.4", ""},
      {"rm.fb_docs", "10", "feedback documents"},
      {"rm.fb_terms", "10", "expansion terms"},
      {"rm.original_query_weight", "0.5", "interpolation weight of the original query"},
      {"ql.mu", "1000", "Dirichlet prior for first-pass query likelihood"},
      {"generation.provider", "replay", "replay | live"},
      {"generation.completions_path", "", "completion cache (read by replay, appended by live)"},
      {"generation.pool_path", "", "generated document pool (JSONL)"},
      {"generation.base_url", "https://api.openai.com/v1", "OpenAI-compatible endpoint"},
      {"generation.model", "gpt-3.5-turbo", ""},
      {"generation.k_subtopics", "5", ""},
      {"generation.g_rounds", "10", ""},
      {"generation.temperature", "0.7", ""},
      {"generation.top_p", "1", ""},
      {"generation.frequency_penalty", "0", ""},
      {"generation.presence_penalty", "0", ""},
      {"generation.max_length", "512", "whitespace tokens kept per generated document"},
      {"generation.min_interval_ms", "200", "minimum gap between live requests"},
      {"generation.max_retries", "5", ""},
      {"rase.estimator", "uniform", "uniform | bm25 | external | gold"},
      {"rase.k_rase", "10", "neighbors per generated document"},
      {"rase.scores_path", "", "external scores TSV qid<TAB>docid<TAB>score"},
      {"rase.scorer_url", "", "external scorer endpoint (used when scores_path is empty)"},
      {"run.method", "bm25", "bm25 | rm3 | grm"},
      {"run.depth", "1000", ""},
      {"tune.grid", "", "name=values;... (empty: the method's standard grid)"},
      {"output.path", "", "output file (stdout when empty)"},
      {"threads", "1", ""},
  };
  return keys;
}

namespace {

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view why) {
  fail(ErrorCategory::kConfig, "config key '" + key + "': " + std::string(why) + " (got '" + value + "')");
}

double as_double(const Config& c, const std::string& key) {
  const std::string v = c.get(key);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno != 0 || !std::isfinite(d)) bad_value(key, v, "expected a number");
  return d;
}

int as_int(const Config& c, const std::string& key) {
  const std::string v = c.get(key);
  char* end = nullptr;
  errno = 0;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0 || n < -1000000000L || n > 1000000000L) {
    bad_value(key, v, "expected an integer");
  }
  return static_cast<int>(n);
}

// Runs `fn` and rewrites any error so that it names `key`.
template <typename Fn>
auto keyed(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.find(key) != std::string::npos) throw;
    fail(e.category() == ErrorCategory::kInvalidArgument ? ErrorCategory::kConfig : e.category(),
         "config key '" + key + "': " + msg);
  }
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) fail(ErrorCategory::kConfig, where + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (!find_key(key)) fail(ErrorCategory::kConfig, where + ": unknown config key '" + key + "'");
    c.values_[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::get(const std::string& key) const {
  const auto* k = find_key(key);
  if (!k) fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
  auto it = values_.find(key);
  return it != values_.end() ? it->second : std::string(k->default_value);
}

const std::string& Settings::require(const std::string& value, std::string_view key) {
  if (value.empty()) fail(ErrorCategory::kConfig, "config key '" + std::string(key) + "' is required");
  return value;
}

Settings resolve(const Config& c) {
  Settings s;
  s.corpus_path = c.get("corpus.path");
  s.corpus_format = c.get("corpus.format");
  if (s.corpus_format != "auto" && s.corpus_format != "jsonl" && s.corpus_format != "trectext") {
    bad_value("corpus.format", s.corpus_format, "expected auto, jsonl or trectext");
  }
  s.index_path = c.get("index.path");
  s.topics_path = c.get("topics.path");
  s.query_variant = keyed("topics.variant", [&] { return generation::parse_query_variant(c.get("topics.variant")); });
  s.qrels_path = c.get("qrels.path");
  s.folds_path = c.get("folds.path");

  const std::string stop = c.get("analyzer.stopwords");
  if (stop == "none") {
    s.analyzer.stopwords.clear();
  } else if (stop != "default") {
    s.analyzer.stopwords = keyed("analyzer.stopwords", [&] { return text::load_stopword_file(stop); });
  }
  s.analyzer.stemmer = keyed("analyzer.stemmer", [&] { return text::parse_stemmer(c.get("analyzer.stemmer")); });
  s.analyzer = s.analyzer.normalized();

  auto& r = s.run;
  r.method = keyed("run.method", [&] { return parse_run_method(c.get("run.method")); });
  r.bm25.k1 = as_double(c, "bm25.k1");
  r.bm25.b = as_double(c, "bm25.b");
  r.rm.fb_docs = as_int(c, "rm.fb_docs");
  r.rm.fb_terms = as_int(c, "rm.fb_terms");
  r.rm.original_query_weight = as_double(c, "rm.original_query_weight");
  r.ql.mu = as_double(c, "ql.mu");
  r.estimator = keyed("rase.estimator", [&] { return rase::parse_estimator(c.get("rase.estimator")); });
  r.k_rase = as_int(c, "rase.k_rase");
  const int depth = as_int(c, "run.depth");
  if (depth < 1) bad_value("run.depth", c.get("run.depth"), "must be >= 1");
  r.depth = static_cast<size_t>(depth);
  keyed("bm25", [&] { r.bm25.validate(); return 0; });
  keyed("rm", [&] { r.rm.validate(); return 0; });
  keyed("ql.mu", [&] { r.ql.validate(); return 0; });
  keyed("rase.k_rase", [&] { rase::validate_k_rase(r.k_rase); return 0; });

  auto& g = s.generation;
  const std::string provider = c.get("generation.provider");
  if (provider == "replay") s.provider = ProviderKind::kReplay;
  else if (provider == "live") s.provider = ProviderKind::kLive;
  else bad_value("generation.provider", provider, "expected replay or live");
  s.completions_path = c.get("generation.completions_path");
  s.pool_path = c.get("generation.pool_path");
  s.base_url = c.get("generation.base_url");
  g.model_name = c.get("generation.model");
  g.k_subtopics = as_int(c, "generation.k_subtopics");
  g.g_rounds = as_int(c, "generation.g_rounds");
  g.temperature = as_double(c, "generation.temperature");
  g.top_p = as_double(c, "generation.top_p");
  g.frequency_penalty = as_double(c, "generation.frequency_penalty");
  g.presence_penalty = as_double(c, "generation.presence_penalty");
  g.max_length = as_int(c, "generation.max_length");
  s.min_interval_ms = as_int(c, "generation.min_interval_ms");
  s.max_retries = as_int(c, "generation.max_retries");
  if (s.min_interval_ms < 0) bad_value("generation.min_interval_ms", c.get("generation.min_interval_ms"), "must be >= 0");
  if (s.max_retries < 0) bad_value("generation.max_retries", c.get("generation.max_retries"), "must be >= 0");
  g.validate();

  s.scores_path = c.get("rase.scores_path");
  s.scorer_url = c.get("rase.scorer_url");
  s.tune_grid = c.get("tune.grid");
  s.output_path = c.get("output.path");
  s.threads = as_int(c, "threads");
  if (s.threads < 1 || s.threads > 256) bad_value("threads", c.get("threads"), "must be in 1..256");
  return s;
}

}  // namespace grm::app
