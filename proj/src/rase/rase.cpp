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

#include "grm/rase/rase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "grm/error.hpp"
#include "grm/log.hpp"

namespace grm::rase {

using generation::GeneratedDocument;
using generation::Topic;
using index::ScoredDoc;
using nlohmann::json;

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "uniform") return EstimatorKind::kUniform;
  if (name == "bm25") return EstimatorKind::kBm25;
  if (name == "external") return EstimatorKind::kExternal;
  if (name == "gold") return EstimatorKind::kGold;
  fail(ErrorCategory::kConfig,
       "unknown estimator '" + std::string(name) + "' (expected uniform|bm25|external|gold)");
}

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kUniform: return "uniform";
    case EstimatorKind::kBm25: return "bm25";
    case EstimatorKind::kExternal: return "external";
    case EstimatorKind::kGold: return "gold";
  }
  return "?";
}

void validate_k_rase(int k_rase) {
  if (k_rase < 1) fail(ErrorCategory::kConfig, "rase.k_rase must be >= 1, got " + std::to_string(k_rase));
}

NeighborSet retrieve_neighbors(const GeneratedDocument& doc, const index::InvertedIndex& index,
                               const index::Bm25Params& params, int k_rase) {
  validate_k_rase(k_rase);
  const auto tokens = index.analyzer().analyze(doc.text);
  return {doc.key(), index::doc_as_query_search(tokens, index, params, static_cast<size_t>(k_rase)), k_rase};
}

// ---------------------------------------------------------------------------

namespace {

std::string pair_key(std::string_view qid, std::string_view docid) {
  std::string k(qid);
  k += '\t';
  k += docid;
  return k;
}

}  // namespace

ExternalScoresFile::ExternalScoresFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open external scores file: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      fail(ErrorCategory::kFormat, where + ": expected qid<TAB>docid<TAB>score");
    }
    const std::string score_text = line.substr(t2 + 1);
    char* end = nullptr;
    const double score = std::strtod(score_text.c_str(), &end);
    if (score_text.empty() || *end != '\0' || !std::isfinite(score)) {
      fail(ErrorCategory::kFormat, where + ": bad score '" + score_text + "'");
    }
    const std::string qid = line.substr(0, t1);
    const std::string docid = line.substr(t1 + 1, t2 - t1 - 1);
    if (qid.empty() || docid.empty()) fail(ErrorCategory::kFormat, where + ": empty qid or docid");
    if (!scores_.emplace(pair_key(qid, docid), score).second) {
      fail(ErrorCategory::kFormat, where + ": duplicate score for (" + qid + ", " + docid + ")");
    }
  }
}

std::vector<double> ExternalScoresFile::score(const Topic& topic, std::span<const std::string> docids) {
  std::vector<double> out;
  out.reserve(docids.size());
  for (const auto& docid : docids) {
    auto it = scores_.find(pair_key(topic.qid, docid));
    if (it == scores_.end()) {
      fail(ErrorCategory::kNotFound, "no external score for (qid " + topic.qid + ", docid " + docid + ")");
    }
    out.push_back(it->second);
  }
  return out;
}

HttpRelevanceScorer::HttpRelevanceScorer(std::string url, TextLookup text, std::chrono::seconds timeout)
    : text_(std::move(text)), timeout_(timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCategory::kConfig, "rase.scorer_url must start with http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::vector<double> HttpRelevanceScorer::score(const Topic& topic, std::span<const std::string> docids) {
  if (docids.empty()) return {};
  json pairs = json::array();
  for (const auto& docid : docids) {
    json p{{"qid", topic.qid}, {"docid", docid}, {"query", topic.text}};
    if (text_) p["document"] = text_(docid);
    pairs.push_back(std::move(p));
  }
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(path_, json{{"pairs", pairs}}.dump(), "application/json");
  if (!res) fail(ErrorCategory::kIo, "scorer endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    fail(ErrorCategory::kIo, "scorer endpoint returned HTTP " + std::to_string(res->status) + " for qid " + topic.qid);
  }
  try {
    const auto scores = json::parse(res->body).at("scores").get<std::vector<double>>();
    if (scores.size() != docids.size()) {
      fail(ErrorCategory::kFormat, "scorer endpoint returned " + std::to_string(scores.size()) +
                                       " scores for " + std::to_string(docids.size()) + " pairs");
    }
    for (size_t i = 0; i < scores.size(); ++i) {
      if (!std::isfinite(scores[i])) {
        fail(ErrorCategory::kFormat, "non-finite score for (qid " + topic.qid + ", docid " + docids[i] + ")");
      }
    }
    return scores;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kFormat, std::string("malformed scorer response: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void check_sources(EstimatorKind kind, const EstimatorSources& sources) {
  switch (kind) {
    case EstimatorKind::kUniform:
      return;
    case EstimatorKind::kBm25:
      if (sources.index == nullptr) fail(ErrorCategory::kConfig, "bm25 estimator needs an index");
      sources.bm25.validate();
      return;
    case EstimatorKind::kExternal:
      if (sources.external == nullptr) {
        fail(ErrorCategory::kConfig, "external estimator needs rase.scores_path or rase.scorer_url");
      }
      return;
    case EstimatorKind::kGold:
      if (sources.qrels == nullptr) fail(ErrorCategory::kConfig, "gold estimator needs qrels");
      return;
  }
}

std::vector<ScoredDoc> estimate_relevance(const Topic& topic, const NeighborSet& neighbors, EstimatorKind kind,
                                          const EstimatorSources& sources) {
  check_sources(kind, sources);
  std::vector<ScoredDoc> out;
  out.reserve(neighbors.neighbors.size());
  switch (kind) {
    case EstimatorKind::kUniform:
      for (const auto& n : neighbors.neighbors) out.push_back({n.docid, 1.0});
      break;
    case EstimatorKind::kBm25: {
      const auto& index = *sources.index;
      const auto query = index::bag_of_words(index.analyzer().analyze(topic.text));
      for (const auto& n : neighbors.neighbors) {
        const auto ordinal = index.doc_ordinal(n.docid);
        if (!ordinal) fail(ErrorCategory::kNotFound, "neighbor " + n.docid + " is not in the index");
        out.push_back({n.docid, index.score_document(query, *ordinal, sources.bm25)});
      }
      break;
    }
    case EstimatorKind::kExternal: {
      std::vector<std::string> docids;
      for (const auto& n : neighbors.neighbors) docids.push_back(n.docid);
      const auto scores = sources.external->score(topic, docids);
      if (scores.size() != docids.size()) fail(ErrorCategory::kInternal, "external scorer returned wrong count");
      for (size_t i = 0; i < docids.size(); ++i) out.push_back({docids[i], scores[i]});
      break;
    }
    case EstimatorKind::kGold: {
      const int max_grade = sources.qrels->max_grade();
      for (const auto& n : neighbors.neighbors) {
        const int g = sources.qrels->grade(topic.qid, n.docid).value_or(0);
        out.push_back({n.docid, max_grade > 0 ? std::max(g, 0) / static_cast<double>(max_grade) : 0.0});
      }
      break;
    }
  }
  return out;
}

std::vector<ScoredDoc> normalize_scores(std::span<const ScoredDoc> raw) {
  std::vector<ScoredDoc> out(raw.begin(), raw.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end(),
                                            [](const ScoredDoc& a, const ScoredDoc& b) { return a.score < b.score; });
  const double min = lo->score;
  const double max = hi->score;
  if (max == min) {
    for (auto& d : out) d.score = min > 0.0 ? 1.0 : 0.0;
    return out;
  }
  for (auto& d : out) d.score = (d.score - min) / (max - min);
  return out;
}

double dcg_aggregate(std::span<const double> sorted_desc) {
  double total = 0.0;
  for (size_t i = 0; i < sorted_desc.size(); ++i) {
    const double s = sorted_desc[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorCategory::kInvalidArgument, "dcg_aggregate expects scores in [0, 1], got " + std::to_string(s));
    }
    if (i > 0 && s > sorted_desc[i - 1]) {
      fail(ErrorCategory::kInvalidArgument, "dcg_aggregate expects scores sorted descending");
    }
    total += i == 0 ? s : s / std::log2(static_cast<double>(i + 1));
  }
  return total;
}

double rase_weight(const GeneratedDocument& doc, const Topic& topic, const index::InvertedIndex& index,
                   const RaseConfig& config, const EstimatorSources& sources) {
  const auto neighbors = retrieve_neighbors(doc, index, config.neighbor_params, config.k_rase);
  const auto normalized = normalize_scores(estimate_relevance(topic, neighbors, config.estimator, sources));
  std::vector<double> scores;
  scores.reserve(normalized.size());
  for (const auto& n : normalized) scores.push_back(n.score);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  return dcg_aggregate(scores);
}

RaseResult rase_weights(std::span<const GeneratedDocument> pool, const Topic& topic,
                        const index::InvertedIndex& index, const RaseConfig& config,
                        const EstimatorSources& sources) {
  validate_k_rase(config.k_rase);
  check_sources(config.estimator, sources);
  RaseResult result;
  result.weights.reserve(pool.size());
  bool any_positive = false;
  for (const auto& doc : pool) {
    const double w = rase_weight(doc, topic, index, config, sources);
    any_positive = any_positive || w > 0.0;
    result.weights.push_back({doc.key(), w});
  }
  if (!pool.empty() && !any_positive) {
    log_warning("all RASE weights are zero for qid " + topic.qid + "; falling back to uniform weights");
    for (auto& w : result.weights) w.weight = 1.0;
    result.fell_back_to_uniform = true;
  }
  return result;
}

}  // namespace grm::rase
