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

#ifndef GRM_TUNING_TUNING_HPP_
#define GRM_TUNING_TUNING_HPP_

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grm/eval/metrics.hpp"
#include "grm/eval/trec.hpp"

namespace grm::tuning {

// Parameter name -> value, in grid declaration order.
using ParamPoint = std::vector<std::pair<std::string, double>>;

std::string to_string(const ParamPoint& point);
// Value of `name` in `point`; throws kInvalidArgument when absent.
double param(const ParamPoint& point, std::string_view name);

// Candidate values. Accepts "start:stop:step" (inclusive of stop when it is
// hit within 1e-9 of a step, e.g. 0.1:5.0:0.2 ends at 4.9), comma lists, or
// a mix ("5,10:30:10"). Throws kConfig on malformed text.
std::vector<double> parse_values(std::string_view text);

class Grid {
 public:
  Grid() = default;
  // Appends a parameter; declared order fixes the enumeration order.
  Grid& add(std::string name, std::vector<double> values);

  bool empty() const;
  size_t size() const;  // number of points
  const std::vector<std::pair<std::string, std::vector<double>>>& params() const { return params_; }

  // Every combination, the first declared parameter varying slowest.
  std::vector<ParamPoint> points() const;

  // k1 0.1..4.9 step 0.2, b 0.1..1.0 step 0.1.
  static Grid bm25();
  // fb_terms 5..95 step 5, fb_docs 5..50 step 5, lambda 0.1..0.9 step 0.1.
  static Grid rm3();
  // fb_docs 5..95 step 10, fb_terms 5..45 step 10, lambda 0.1..0.9 step 0.1.
  static Grid grm();
  // k_rase 10..100 step 10.
  static Grid k_rase();

 private:
  std::vector<std::pair<std::string, std::vector<double>>> params_;
};

// Fold id -> qids.
using FoldSpec = std::map<std::string, std::vector<std::string>>;

// JSON object of fold id -> array of qid strings.
FoldSpec read_folds(const std::string& path);
FoldSpec parse_folds(std::string_view json_text, const std::string& source);

// Throws kConfig unless there are at least two folds, each non-empty, they
// are disjoint and (when `topics` is given) exactly cover the topic qids.
void validate_folds(const FoldSpec& folds, const std::vector<std::string>* topics = nullptr);

struct FoldResult {
  std::string fold_id;
  ParamPoint chosen;
  double train_recall = 0.0;  // mean R@1000 of `chosen` on the other folds
  eval::MetricReport test;    // `chosen` on this fold
};

struct TuneResult {
  std::vector<FoldResult> folds;
  eval::Run combined;            // held-out rankings of every fold
  eval::MetricReport aggregate;  // evaluation of `combined`
  std::vector<std::string> failed_points;
};

// Produces a run over all topics for one grid point. May throw; a failing
// point is skipped with a warning.
using RunProducer = std::function<eval::Run(const ParamPoint&)>;

// For every fold, picks the point with the highest mean Recall@1000 on the
// union of the other folds (first point in enumeration order on ties) and
// evaluates it on the fold. Needs at least two folds. Points are produced
// once each, `threads` at a time.
TuneResult cross_validate(const RunProducer& producer, const Grid& grid, const FoldSpec& folds,
                          const eval::Qrels& qrels, int threads = 1);

}  // namespace grm::tuning

#endif  // GRM_TUNING_TUNING_HPP_
