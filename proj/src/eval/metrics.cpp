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

#include "grm/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/special_functions/beta.hpp>

#include "grm/error.hpp"

namespace grm::eval {

namespace {

std::span<const index::ScoredDoc> cut(std::span<const index::ScoredDoc> ranking, size_t depth) {
  return ranking.first(std::min(ranking.size(), depth));
}

int grade_of(const Judgments& j, const std::string& docid) {
  auto it = j.find(docid);
  return it == j.end() ? 0 : it->second;
}

size_t relevant_in(const Judgments& j) {
  size_t n = 0;
  for (const auto& [docid, g] : j) n += g >= 1 ? 1 : 0;
  return n;
}

}  // namespace

std::optional<double> average_precision(std::span<const index::ScoredDoc> ranking,
                                        const Judgments& judgments) {
  const size_t relevant = relevant_in(judgments);
  if (relevant == 0) return std::nullopt;
  double sum = 0.0;
  size_t hits = 0;
  size_t rank = 0;
  for (const auto& d : cut(ranking, kEvalDepth)) {
    ++rank;
    if (grade_of(judgments, d.docid) >= 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(relevant);
}

std::optional<double> ndcg(std::span<const index::ScoredDoc> ranking, const Judgments& judgments) {
  std::vector<int> gains;
  for (const auto& [docid, g] : judgments) {
    if (g > 0) gains.push_back(g);
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  if (gains.size() > kEvalDepth) gains.resize(kEvalDepth);
  double ideal = 0.0;
  for (size_t i = 0; i < gains.size(); ++i) ideal += gains[i] / std::log2(static_cast<double>(i + 2));
  if (ideal <= 0.0) return std::nullopt;
  double dcg = 0.0;
  size_t rank = 0;
  for (const auto& d : cut(ranking, kEvalDepth)) {
    ++rank;
    const int g = grade_of(judgments, d.docid);
    if (g > 0) dcg += g / std::log2(static_cast<double>(rank + 1));
  }
  return dcg / ideal;
}

std::optional<double> recall_at_k(std::span<const index::ScoredDoc> ranking,
                                  const Judgments& judgments, size_t k) {
  const size_t relevant = relevant_in(judgments);
  if (relevant == 0) return std::nullopt;
  size_t hits = 0;
  for (const auto& d : cut(ranking, std::min(k, kEvalDepth))) hits += grade_of(judgments, d.docid) >= 1 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(relevant);
}

const QueryMetrics* MetricReport::find(const std::string& qid) const {
  auto it = std::lower_bound(per_query.begin(), per_query.end(), qid,
                             [](const QueryMetrics& q, const std::string& id) { return q.qid < id; });
  return it != per_query.end() && it->qid == qid ? &*it : nullptr;
}

MetricReport evaluate(const Run& run, const Qrels& qrels, const std::vector<std::string>* only_qids) {
  std::map<std::string, const QueryRanking*> rankings;
  for (const auto& q : run.queries) rankings[q.qid] = &q;

  std::vector<std::string> qids = only_qids != nullptr ? *only_qids : qrels.qids();
  std::sort(qids.begin(), qids.end());
  qids.erase(std::unique(qids.begin(), qids.end()), qids.end());

  MetricReport report;
  report.tag = run.tag;
  for (const auto& qid : qids) {
    const Judgments* j = qrels.judgments(qid);
    if (j == nullptr || qrels.relevant_count(qid) == 0) continue;
    auto it = rankings.find(qid);
    std::span<const index::ScoredDoc> docs;
    if (it != rankings.end()) docs = it->second->docs;
    QueryMetrics m;
    m.qid = qid;
    m.map = average_precision(docs, *j).value_or(0.0);
    m.ndcg = ndcg(docs, *j).value_or(0.0);
    m.recall_1000 = recall_at_k(docs, *j).value_or(0.0);
    report.per_query.push_back(std::move(m));
  }
  if (!report.per_query.empty()) {
    const double n = static_cast<double>(report.per_query.size());
    for (const auto& m : report.per_query) {
      report.map += m.map;
      report.ndcg += m.ndcg;
      report.recall_1000 += m.recall_1000;
    }
    report.map /= n;
    report.ndcg /= n;
    report.recall_1000 /= n;
  }
  return report;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCategory::kInvalidArgument, "paired t-test needs equal-length samples (" +
                                              std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const size_t n = a.size();
  if (n < 2) fail(ErrorCategory::kInvalidArgument, "paired t-test needs at least 2 pairs");
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  TTestResult r;
  r.n = n;
  const double df = static_cast<double>(n - 1);
  const double se = std::sqrt(ss / df / static_cast<double>(n));
  if (se == 0.0) {
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.t = mean / se;
  // Two-sided tail of Student's t: I_{df/(df+t^2)}(df/2, 1/2).
  r.p = boost::math::ibeta(df / 2.0, 0.5, df / (df + r.t * r.t));
  return r;
}

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kMap: return "map";
    case Measure::kNdcg: return "ndcg";
    case Measure::kRecall1000: return "recall_1000";
  }
  return "?";
}

double measure_value(const QueryMetrics& q, Measure m) {
  switch (m) {
    case Measure::kMap: return q.map;
    case Measure::kNdcg: return q.ndcg;
    case Measure::kRecall1000: return q.recall_1000;
  }
  return 0.0;
}

TTestResult compare_reports(const MetricReport& system, const MetricReport& baseline, Measure m) {
  std::vector<double> a, b;
  for (const auto& q : system.per_query) {
    if (const auto* other = baseline.find(q.qid)) {
      a.push_back(measure_value(q, m));
      b.push_back(measure_value(*other, m));
    }
  }
  return paired_t_test(a, b);
}

}  // namespace grm::eval
