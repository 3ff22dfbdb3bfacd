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

#ifndef GRM_RASE_RASE_HPP_
#define GRM_RASE_RASE_HPP_

#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grm/eval/trec.hpp"
#include "grm/generation/types.hpp"
#include "grm/index/inverted_index.hpp"

namespace grm::rase {

enum class EstimatorKind { kUniform, kBm25, kExternal, kGold };

// Throws kConfig for an unknown name.
EstimatorKind parse_estimator(std::string_view name);
std::string_view estimator_name(EstimatorKind kind);

// Throws kConfig unless k_rase >= 1.
void validate_k_rase(int k_rase);

struct NeighborSet {
  generation::GenKey key;
  std::vector<index::ScoredDoc> neighbors;  // similarity desc, docid asc
  int k_rase = 0;
};

// The collection documents closest to the generated text under BM25, using
// the analyzed generated text as a bag-of-words query.
NeighborSet retrieve_neighbors(const generation::GeneratedDocument& doc,
                               const index::InvertedIndex& index, const index::Bm25Params& params,
                               int k_rase);

// Relevance scores supplied from outside, one per (qid, docid).
class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  // One score per docid, in order. Throws when any pair has no score.
  virtual std::vector<double> score(const generation::Topic& topic,
                                    std::span<const std::string> docids) = 0;
};

// TSV "qid<TAB>docid<TAB>score". A lookup miss is a kNotFound error naming
// the pair; duplicate pairs and unparsable scores are kFormat errors.
class ExternalScoresFile : public RelevanceScorer {
 public:
  explicit ExternalScoresFile(const std::string& path);

  std::vector<double> score(const generation::Topic& topic,
                            std::span<const std::string> docids) override;
  size_t size() const { return scores_.size(); }

 private:
  std::unordered_map<std::string, double> scores_;  // qid '\t' docid -> score
};

// POST {url} with {"pairs": [{"qid", "docid", "query", "document"}]}; the
// reply is {"scores": [...]} with one number per pair, in order. "document"
// is sent only when a text lookup is configured.
class HttpRelevanceScorer : public RelevanceScorer {
 public:
  using TextLookup = std::function<std::string(const std::string& docid)>;

  explicit HttpRelevanceScorer(std::string url, TextLookup text = {},
                               std::chrono::seconds timeout = std::chrono::seconds(300));

  std::vector<double> score(const generation::Topic& topic,
                            std::span<const std::string> docids) override;

 private:
  std::string scheme_host_;
  std::string path_;
  TextLookup text_;
  std::chrono::seconds timeout_;
};

struct EstimatorSources {
  const index::InvertedIndex* index = nullptr;  // bm25
  index::Bm25Params bm25;                       // bm25
  RelevanceScorer* external = nullptr;          // external
  const eval::Qrels* qrels = nullptr;           // gold
};

// Throws kConfig when the sources required by `kind` are missing.
void check_sources(EstimatorKind kind, const EstimatorSources& sources);

// Raw relevance estimate of each neighbor for the topic, in neighbor order.
//   uniform  1.0
//   bm25     BM25 score of the topic text against the neighbor
//   external the scorer's value
//   gold     max(grade, 0) / max grade of the qrels; unjudged scores 0
std::vector<index::ScoredDoc> estimate_relevance(const generation::Topic& topic,
                                                 const NeighborSet& neighbors, EstimatorKind kind,
                                                 const EstimatorSources& sources);

// Min-max normalization, order preserved. A constant list maps to 1.0 when
// its value is positive and to 0.0 otherwise.
std::vector<index::ScoredDoc> normalize_scores(std::span<const index::ScoredDoc> raw);

// s_1 + sum_{i>=2} s_i / log2(i). Input must be sorted descending with values
// in [0, 1]; anything else is a kInvalidArgument error.
double dcg_aggregate(std::span<const double> sorted_desc);

struct RaseWeight {
  generation::GenKey key;
  double weight = 0.0;
};

struct RaseResult {
  std::vector<RaseWeight> weights;  // pool order
  // Every weight came out zero and was replaced by 1.0.
  bool fell_back_to_uniform = false;
};

struct RaseConfig {
  index::Bm25Params neighbor_params;
  int k_rase = 10;
  EstimatorKind estimator = EstimatorKind::kUniform;
};

// Weight of a single generated document: neighbors, estimates, normalization,
// re-sort by normalized estimate, then DCG.
double rase_weight(const generation::GeneratedDocument& doc, const generation::Topic& topic,
                   const index::InvertedIndex& index, const RaseConfig& config,
                   const EstimatorSources& sources);

// One weight per pool document. If the pool is non-empty and every weight is
// zero, all weights become 1.0 and a warning is logged.
RaseResult rase_weights(std::span<const generation::GeneratedDocument> pool,
                        const generation::Topic& topic, const index::InvertedIndex& index,
                        const RaseConfig& config, const EstimatorSources& sources);

}  // namespace grm::rase

#endif  // GRM_RASE_RASE_HPP_
