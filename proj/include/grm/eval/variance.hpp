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

#ifndef GRM_EVAL_VARIANCE_HPP_
#define GRM_EVAL_VARIANCE_HPP_

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "grm/eval/metrics.hpp"
#include "grm/eval/trec.hpp"
#include "grm/expansion/expansion.hpp"
#include "grm/generation/types.hpp"
#include "grm/index/inverted_index.hpp"

namespace grm::eval {

struct VarianceRow {
  std::string qid;
  int position = 0;  // 1 = worst
  generation::GenKey key;
  double map = 0.0;
  double recall_1000 = 0.0;
};

struct VarianceFailure {
  generation::GenKey key;
  std::string message;
};

struct VarianceTable {
  std::vector<VarianceRow> rows;
  std::vector<VarianceFailure> failures;
};

struct VarianceParams {
  index::Bm25Params bm25;
  int fb_terms = 10;
  double original_query_weight = 0.5;
  size_t depth = kEvalDepth;
};

// Expands the topic with each generated document alone (one feedback doc,
// weight 1), runs the expanded query, and scores it. Rows are sorted by MAP
// ascending (then recall, then key) and numbered 1..N. A document whose run
// fails is listed in `failures`. Topics without relevant documents give an
// empty table.
VarianceTable variance_analysis(const generation::Topic& topic,
                                std::span<const generation::GeneratedDocument> pool,
                                const index::InvertedIndex& index, const VarianceParams& params,
                                const Qrels& qrels);

// "qid,position,map,recall_at_1000" then one row per line.
void write_variance_csv(std::span<const VarianceRow> rows, std::ostream& out);

}  // namespace grm::eval

#endif  // GRM_EVAL_VARIANCE_HPP_
