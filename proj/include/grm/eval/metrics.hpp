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

#ifndef GRM_EVAL_METRICS_HPP_
#define GRM_EVAL_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grm/eval/trec.hpp"

namespace grm::eval {

inline constexpr size_t kEvalDepth = 1000;

// Per-query metrics over the first kEvalDepth entries of `ranking`. Each
// returns nullopt when the query has no relevant document (or, for nDCG, a
// zero ideal DCG); such queries are left out of means.
std::optional<double> average_precision(std::span<const index::ScoredDoc> ranking,
                                        const Judgments& judgments);
// Linear gain max(grade, 0), discount log2(rank + 1); ideal DCG from the
// judgments, cut at the same depth.
std::optional<double> ndcg(std::span<const index::ScoredDoc> ranking, const Judgments& judgments);
std::optional<double> recall_at_k(std::span<const index::ScoredDoc> ranking,
                                  const Judgments& judgments, size_t k = kEvalDepth);

struct QueryMetrics {
  std::string qid;
  double map = 0.0;
  double ndcg = 0.0;
  double recall_1000 = 0.0;
};

struct MetricReport {
  std::string tag;
  std::vector<QueryMetrics> per_query;  // ascending qid
  double map = 0.0;
  double ndcg = 0.0;
  double recall_1000 = 0.0;

  size_t query_count() const { return per_query.size(); }
  const QueryMetrics* find(const std::string& qid) const;
};

// Evaluates every query that has at least one relevant judgment, restricted
// to `only_qids` when given. A query missing from the run scores zero.
MetricReport evaluate(const Run& run, const Qrels& qrels,
                      const std::vector<std::string>* only_qids = nullptr);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  size_t n = 0;
  bool significant(double alpha = 0.05) const { return p < alpha; }
};

// Paired two-sided t-test on a[i] - b[i]. Zero variance gives p = 1 when the
// mean difference is zero and p = 0 otherwise (t is then 0 or +-inf).
// Throws kInvalidArgument on a length mismatch or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

enum class Measure { kMap, kNdcg, kRecall1000 };
std::string_view measure_name(Measure m);
double measure_value(const QueryMetrics& q, Measure m);

// Per-query values of `m` for the queries both reports share, paired by qid.
TTestResult compare_reports(const MetricReport& system, const MetricReport& baseline, Measure m);

}  // namespace grm::eval

#endif  // GRM_EVAL_METRICS_HPP_
