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

#include "grm/expansion/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "grm/error.hpp"
#include "grm/log.hpp"

namespace grm::expansion {

using generation::GeneratedDocument;
using generation::Topic;

void RmParams::validate() const {
  if (fb_docs < 1) fail(ErrorCategory::kConfig, "fb_docs must be >= 1, got " + std::to_string(fb_docs));
  if (fb_terms < 1) fail(ErrorCategory::kConfig, "fb_terms must be >= 1, got " + std::to_string(fb_terms));
  if (!(original_query_weight >= 0.0 && original_query_weight <= 1.0)) {
    fail(ErrorCategory::kConfig, "original_query_weight must be in [0, 1]");
  }
}

void QlParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) fail(ErrorCategory::kConfig, "ql.mu must be a positive number");
}

std::string_view method_name(Method m) { return m == Method::kRm3 ? "rm3" : "grm"; }

double query_likelihood(std::span<const std::string> query_tokens, std::string_view docid,
                        const index::InvertedIndex& index, const QlParams& ql) {
  ql.validate();
  const auto ordinal = index.doc_ordinal(docid);
  if (!ordinal) fail(ErrorCategory::kNotFound, "unknown docid: " + std::string(docid));
  const auto terms = index.doc_terms(*ordinal);
  const double doc_len = index.doc_length(*ordinal);
  const double total = static_cast<double>(index.total_terms());
  double log_likelihood = 0.0;
  for (const auto& token : query_tokens) {
    const auto id = index.term_id(token);
    if (!id) continue;
    const auto it = std::lower_bound(terms.begin(), terms.end(), *id,
                                     [](const index::TermCount& tc, uint32_t t) { return tc.term < t; });
    const double tf = it != terms.end() && it->term == *id ? it->tf : 0.0;
    const double p_c = static_cast<double>(index.collection_frequency(*id)) / total;
    log_likelihood += std::log((tf + ql.mu * p_c) / (doc_len + ql.mu));
  }
  return log_likelihood;
}

LanguageModel relevance_model(std::span<const Feedback> feedback) {
  double total_weight = 0.0;
  for (const auto& f : feedback) {
    if (!(f.weight >= 0.0) || !std::isfinite(f.weight)) {
      fail(ErrorCategory::kInvalidArgument, "feedback weights must be finite and non-negative");
    }
    if (!f.model.empty()) total_weight += f.weight;
  }
  if (!(total_weight > 0.0)) {
    fail(ErrorCategory::kInvalidArgument, "relevance model needs at least one positive feedback weight");
  }
  LanguageModel out;
  for (const auto& f : feedback) {
    if (f.model.empty() || f.weight == 0.0) continue;
    const double share = f.weight / total_weight;
    for (const auto& [term, p] : f.model) out[term] += p * share;
  }
  return out;
}

LanguageModel truncate_and_renormalize(const LanguageModel& model, int fb_terms) {
  if (fb_terms < 1) fail(ErrorCategory::kConfig, "fb_terms must be >= 1");
  std::vector<std::pair<std::string_view, double>> ranked(model.begin(), model.end());
  const size_t keep = std::min(ranked.size(), static_cast<size_t>(fb_terms));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(keep), ranked.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  ranked.resize(keep);
  double mass = 0.0;
  for (const auto& [t, p] : ranked) mass += p;
  LanguageModel out;
  if (!(mass > 0.0)) return out;
  for (const auto& [t, p] : ranked) out.emplace(std::string(t), p / mass);
  return out;
}

ExpandedQuery interpolate(const std::string& qid, const LanguageModel& original, const LanguageModel& feedback,
                          double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCategory::kConfig, "interpolation weight must be in [0, 1]");
  LanguageModel mixed;
  for (const auto& [t, p] : original) mixed[t] += lambda * p;
  for (const auto& [t, p] : feedback) mixed[t] += (1.0 - lambda) * p;
  ExpandedQuery q;
  q.qid = qid;
  for (const auto& [t, w] : mixed) {
    if (w > 0.0) q.terms.emplace_back(t, w);
  }
  std::stable_sort(q.terms.begin(), q.terms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return q;
}

LanguageModel query_model(const Topic& topic, const index::InvertedIndex& index) {
  return maximum_likelihood(index.analyzer().analyze(topic.text));
}

ExpandedQuery rm3_expand(const Topic& topic, const index::InvertedIndex& index, const index::Bm25Params& bm25,
                         const RmParams& rm, const QlParams& ql) {
  rm.validate();
  ql.validate();
  const auto tokens = index.analyzer().analyze(topic.text);
  const auto original = maximum_likelihood(tokens);
  const auto first_pass = index::bm25_search(tokens, index, bm25, static_cast<size_t>(rm.fb_docs));
  ExpandedQuery out;
  if (first_pass.empty()) {
    log_info("qid " + topic.qid + ": first pass retrieved nothing, using the original query");
    out = interpolate(topic.qid, original, {}, 1.0);
  } else {
    std::vector<double> log_ql;
    for (const auto& d : first_pass) log_ql.push_back(query_likelihood(tokens, d.docid, index, ql));
    const double max_log = *std::max_element(log_ql.begin(), log_ql.end());
    std::vector<Feedback> feedback;
    for (size_t i = 0; i < first_pass.size(); ++i) {
      feedback.push_back({index::doc_language_model(first_pass[i].docid, index), std::exp(log_ql[i] - max_log)});
    }
    const auto model = truncate_and_renormalize(relevance_model(feedback), rm.fb_terms);
    out = interpolate(topic.qid, original, model, rm.original_query_weight);
  }
  out.method = Method::kRm3;
  out.params = rm;
  return out;
}

ExpandedQuery grm_expand(const Topic& topic, std::span<const GeneratedDocument> pool,
                         std::span<const rase::RaseWeight> weights, const RmParams& rm,
                         const index::InvertedIndex& index) {
  rm.validate();
  if (pool.empty()) fail(ErrorCategory::kInvalidArgument, "qid " + topic.qid + ": empty generated pool");
  if (weights.size() != pool.size()) {
    fail(ErrorCategory::kInvalidArgument, "qid " + topic.qid + ": pool and weights differ in length");
  }
  std::vector<size_t> order(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].qid != topic.qid) {
      fail(ErrorCategory::kInvalidArgument, "qid " + topic.qid + ": pool contains " + to_string(pool[i].key()));
    }
    if (!(weights[i].key == pool[i].key())) {
      fail(ErrorCategory::kInvalidArgument, "qid " + topic.qid + ": weight " + to_string(weights[i].key) +
                                                " does not match pool document " + to_string(pool[i].key()));
    }
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (weights[a].weight != weights[b].weight) return weights[a].weight > weights[b].weight;
    return weights[a].key < weights[b].key;
  });
  order.resize(std::min(order.size(), static_cast<size_t>(rm.fb_docs)));
  std::vector<Feedback> feedback;
  for (size_t i : order) {
    feedback.push_back({maximum_likelihood(index.analyzer().analyze(pool[i].text)), weights[i].weight});
  }
  const auto model = truncate_and_renormalize(relevance_model(feedback), rm.fb_terms);
  auto out = interpolate(topic.qid, query_model(topic, index), model, rm.original_query_weight);
  out.method = Method::kGrm;
  out.params = rm;
  return out;
}

std::vector<index::ScoredDoc> execute_expanded(const ExpandedQuery& expanded, const index::InvertedIndex& index,
                                               const index::Bm25Params& bm25, size_t k) {
  return index.search(expanded.weighted_query(), bm25, k);
}

void write_expanded(const ExpandedQuery& expanded, std::ostream& out) {
  char weight[64];
  for (const auto& [term, w] : expanded.terms) {
    std::snprintf(weight, sizeof(weight), "%.17g", w);
    out << expanded.qid << '\t' << term << '\t' << weight << '\n';
  }
}

}  // namespace grm::expansion
