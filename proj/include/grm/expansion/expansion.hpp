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

#ifndef GRM_EXPANSION_EXPANSION_HPP_
#define GRM_EXPANSION_EXPANSION_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grm/generation/types.hpp"
#include "grm/index/inverted_index.hpp"
#include "grm/language_model.hpp"
#include "grm/rase/rase.hpp"

namespace grm::expansion {

struct RmParams {
  int fb_docs = 10;
  int fb_terms = 10;
  double original_query_weight = 0.5;  // lambda

  // Throws kConfig unless fb_docs, fb_terms >= 1 and lambda in [0, 1].
  void validate() const;
};

struct QlParams {
  double mu = 1000.0;
  void validate() const;
};

enum class Method { kRm3, kGrm };
std::string_view method_name(Method m);

struct ExpandedQuery {
  std::string qid;
  // Weight descending, term ascending on ties. All weights > 0.
  std::vector<std::pair<std::string, double>> terms;
  Method method = Method::kRm3;
  RmParams params;

  index::WeightedQuery weighted_query() const { return {terms.begin(), terms.end()}; }
};

// sum over query tokens q of log((tf(q,D) + mu P(q|C)) / (|D| + mu)). Tokens
// that never occur in the collection are skipped. Throws kNotFound for an
// unknown docid.
double query_likelihood(std::span<const std::string> query_tokens, std::string_view docid,
                        const index::InvertedIndex& index, const QlParams& ql);

struct Feedback {
  LanguageModel model;
  double weight = 0.0;
};

// sum_D P(w|D) weight(D) / sum weight. Entries with an empty model are
// skipped entirely. Throws kInvalidArgument when no remaining entry has a
// positive weight or any weight is negative.
LanguageModel relevance_model(std::span<const Feedback> feedback);

// Top fb_terms terms by probability (term ascending on ties), rescaled to sum
// to one.
LanguageModel truncate_and_renormalize(const LanguageModel& model, int fb_terms);

// lambda P(w|Q) + (1 - lambda) P(w|F). Zero weights are dropped.
ExpandedQuery interpolate(const std::string& qid, const LanguageModel& original,
                          const LanguageModel& feedback, double lambda);

// Query model: MLE over the analyzed query tokens.
LanguageModel query_model(const generation::Topic& topic, const index::InvertedIndex& index);

// Pseudo-relevance feedback from the first-pass BM25 top fb_docs, weighted by
// softmax-normalized Dirichlet query likelihoods.
ExpandedQuery rm3_expand(const generation::Topic& topic, const index::InvertedIndex& index,
                         const index::Bm25Params& bm25, const RmParams& rm, const QlParams& ql);

// Feedback from the generated pool: the fb_docs highest-weighted documents
// (GenKey ascending on ties; fb_docs clamps to the pool size), each
// represented by the MLE of its analyzed text. `weights` must align with
// `pool` by key. Throws kInvalidArgument for an empty or misaligned pool.
ExpandedQuery grm_expand(const generation::Topic& topic,
                         std::span<const generation::GeneratedDocument> pool,
                         std::span<const rase::RaseWeight> weights, const RmParams& rm,
                         const index::InvertedIndex& index);

// Second-pass retrieval: sum_w weight(w) * BM25 term score.
std::vector<index::ScoredDoc> execute_expanded(const ExpandedQuery& expanded,
                                               const index::InvertedIndex& index,
                                               const index::Bm25Params& bm25, size_t k);

// "qid<TAB>term<TAB>weight" lines, weight descending.
void write_expanded(const ExpandedQuery& expanded, std::ostream& out);

}  // namespace grm::expansion

#endif  // GRM_EXPANSION_EXPANSION_HPP_
