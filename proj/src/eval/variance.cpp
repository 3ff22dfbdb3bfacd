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

#include "grm/eval/variance.hpp"

#include <algorithm>
#include <cstdio>

#include "grm/error.hpp"
#include "grm/eval/metrics.hpp"
#include "grm/log.hpp"

namespace grm::eval {

VarianceTable variance_analysis(const generation::Topic& topic,
                                std::span<const generation::GeneratedDocument> pool,
                                const index::InvertedIndex& index, const VarianceParams& params,
                                const Qrels& qrels) {
  VarianceTable table;
  const Judgments* judged = qrels.judgments(topic.qid);
  if (judged == nullptr || qrels.relevant_count(topic.qid) == 0) {
    log_info("variance: qid " + topic.qid + " has no relevant documents; skipped");
    return table;
  }
  expansion::RmParams rm;
  rm.fb_docs = 1;
  rm.fb_terms = params.fb_terms;
  rm.original_query_weight = params.original_query_weight;
  rm.validate();

  for (const auto& doc : pool) {
    try {
      const rase::RaseWeight w{doc.key(), 1.0};
      const auto q = expansion::grm_expand(topic, std::span(&doc, 1), std::span(&w, 1), rm, index);
      const auto ranking = expansion::execute_expanded(q, index, params.bm25, params.depth);
      table.rows.push_back({topic.qid, 0, doc.key(), *average_precision(ranking, *judged),
                            *recall_at_k(ranking, *judged)});
    } catch (const std::exception& e) {
      log_warning("variance: " + generation::to_string(doc.key()) + " failed: " + e.what());
      table.failures.push_back({doc.key(), e.what()});
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const VarianceRow& a, const VarianceRow& b) {
    if (a.map != b.map) return a.map < b.map;
    if (a.recall_1000 != b.recall_1000) return a.recall_1000 < b.recall_1000;
    return a.key < b.key;
  });
  for (size_t i = 0; i < table.rows.size(); ++i) table.rows[i].position = static_cast<int>(i + 1);
  return table;
}

void write_variance_csv(std::span<const VarianceRow> rows, std::ostream& out) {
  out << "qid,position,map,recall_at_1000\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%d,%.6f,%.6f\n", r.position, r.map, r.recall_1000);
    out << r.qid << buf;
  }
}

}  // namespace grm::eval
