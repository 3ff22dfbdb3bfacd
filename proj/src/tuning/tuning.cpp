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

#include "grm/tuning/tuning.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "grm/error.hpp"
#include "grm/log.hpp"

namespace grm::tuning {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return std::string(s.substr(a, b - a + 1));
}

double parse_number(const std::string& text, std::string_view whole) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !std::isfinite(v)) {
    fail(ErrorCategory::kConfig, "bad grid value '" + text + "' in '" + std::string(whole) + "'");
  }
  return v;
}

// Snaps accumulated range values to 9 decimals so 0.1 + 2 * 0.2 prints as 0.5.
double snap(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

std::string to_string(const ParamPoint& point) {
  std::string out;
  char buf[64];
  for (const auto& [name, value] : point) {
    if (!out.empty()) out += ',';
    std::snprintf(buf, sizeof(buf), "%g", value);
    out += name + "=" + buf;
  }
  return out;
}

double param(const ParamPoint& point, std::string_view name) {
  for (const auto& [n, v] : point) {
    if (n == name) return v;
  }
  fail(ErrorCategory::kInvalidArgument, "grid point has no parameter '" + std::string(name) + "'");
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream parts{std::string(text)};
  while (std::getline(parts, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(ErrorCategory::kConfig, "empty item in grid '" + std::string(text) + "'");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number(item, text));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos || item.find(':', c2 + 1) != std::string::npos) {
      fail(ErrorCategory::kConfig, "range must be start:stop:step, got '" + item + "'");
    }
    const double start = parse_number(trim(item.substr(0, c1)), text);
    const double stop = parse_number(trim(item.substr(c1 + 1, c2 - c1 - 1)), text);
    const double step = parse_number(trim(item.substr(c2 + 1)), text);
    if (!(step > 0.0)) fail(ErrorCategory::kConfig, "range step must be positive in '" + item + "'");
    if (stop < start) fail(ErrorCategory::kConfig, "range stop is below start in '" + item + "'");
    for (long i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9) break;
      out.push_back(snap(v));
      if (out.size() > 1000000) fail(ErrorCategory::kConfig, "range '" + item + "' is too large");
    }
  }
  if (out.empty()) fail(ErrorCategory::kConfig, "empty grid '" + std::string(text) + "'");
  return out;
}

Grid& Grid::add(std::string name, std::vector<double> values) {
  if (values.empty()) fail(ErrorCategory::kConfig, "grid parameter '" + name + "' has no values");
  for (const auto& [n, v] : params_) {
    if (n == name) fail(ErrorCategory::kConfig, "grid parameter '" + name + "' declared twice");
  }
  params_.emplace_back(std::move(name), std::move(values));
  return *this;
}

bool Grid::empty() const { return params_.empty(); }

size_t Grid::size() const {
  if (params_.empty()) return 0;
  size_t n = 1;
  for (const auto& [name, values] : params_) n *= values.size();
  return n;
}

std::vector<ParamPoint> Grid::points() const {
  std::vector<ParamPoint> out;
  if (params_.empty()) return out;
  std::vector<size_t> idx(params_.size(), 0);
  while (true) {
    ParamPoint p;
    for (size_t i = 0; i < params_.size(); ++i) p.emplace_back(params_[i].first, params_[i].second[idx[i]]);
    out.push_back(std::move(p));
    size_t i = params_.size();
    while (i > 0) {
      --i;
      if (++idx[i] < params_[i].second.size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
  }
}

Grid Grid::bm25() {
  Grid g;
  g.add("bm25.k1", parse_values("0.1:5.0:0.2")).add("bm25.b", parse_values("0.1:1.0:0.1"));
  return g;
}

Grid Grid::rm3() {
  Grid g;
  g.add("rm.fb_terms", parse_values("5:95:5"))
      .add("rm.fb_docs", parse_values("5:50:5"))
      .add("rm.original_query_weight", parse_values("0.1:0.9:0.1"));
  return g;
}

Grid Grid::grm() {
  Grid g;
  g.add("rm.fb_docs", parse_values("5:95:10"))
      .add("rm.fb_terms", parse_values("5:45:10"))
      .add("rm.original_query_weight", parse_values("0.1:0.9:0.1"));
  return g;
}

Grid Grid::k_rase() {
  Grid g;
  g.add("rase.k_rase", parse_values("10:100:10"));
  return g;
}

// ---------------------------------------------------------------------------

FoldSpec parse_folds(std::string_view json_text, const std::string& source) {
  FoldSpec folds;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) fail(ErrorCategory::kFormat, source + ": folds must be a JSON object");
    for (const auto& [id, qids] : j.items()) {
      if (!qids.is_array()) fail(ErrorCategory::kFormat, source + ": fold '" + id + "' must be an array");
      auto& fold = folds[id];
      for (const auto& q : qids) {
        if (!q.is_string()) fail(ErrorCategory::kFormat, source + ": fold '" + id + "' has a non-string qid");
        fold.push_back(q.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kFormat, source + ": " + e.what());
  }
  return folds;
}

FoldSpec read_folds(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open folds file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_folds(buf.str(), path);
}

void validate_folds(const FoldSpec& folds, const std::vector<std::string>* topics) {
  if (folds.size() < 2) fail(ErrorCategory::kConfig, "cross-validation needs at least two folds");
  std::set<std::string> seen;
  for (const auto& [id, qids] : folds) {
    if (qids.empty()) fail(ErrorCategory::kConfig, "fold '" + id + "' is empty");
    for (const auto& q : qids) {
      if (!seen.insert(q).second) fail(ErrorCategory::kConfig, "qid " + q + " appears in more than one fold");
    }
  }
  if (topics != nullptr) {
    const std::set<std::string> wanted(topics->begin(), topics->end());
    for (const auto& q : wanted) {
      if (!seen.contains(q)) fail(ErrorCategory::kConfig, "topic " + q + " is not in any fold");
    }
    for (const auto& q : seen) {
      if (!wanted.contains(q)) fail(ErrorCategory::kConfig, "fold qid " + q + " is not a topic");
    }
  }
}

TuneResult cross_validate(const RunProducer& producer, const Grid& grid, const FoldSpec& folds,
                          const eval::Qrels& qrels, int threads) {
  if (grid.empty()) fail(ErrorCategory::kConfig, "empty tuning grid");
  validate_folds(folds);
  const auto points = grid.points();

  std::vector<std::optional<eval::Run>> runs(points.size());
  TuneResult result;
  const size_t batch = static_cast<size_t>(std::max(threads, 1));
  for (size_t start = 0; start < points.size(); start += batch) {
    const size_t end = std::min(points.size(), start + batch);
    std::vector<std::future<eval::Run>> futures;
    for (size_t i = start; i < end; ++i) {
      futures.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred,
                                   [&producer, &points, i] { return producer(points[i]); }));
    }
    for (size_t i = start; i < end; ++i) {
      try {
        runs[i] = futures[i - start].get();
      } catch (const std::exception& e) {
        log_warning("grid point " + to_string(points[i]) + " failed and is skipped: " + e.what());
        result.failed_points.push_back(to_string(points[i]));
      }
    }
  }

  for (const auto& [fold_id, test_qids] : folds) {
    std::vector<std::string> train_qids;
    for (const auto& [other_id, qids] : folds) {
      if (other_id != fold_id) train_qids.insert(train_qids.end(), qids.begin(), qids.end());
    }
    std::optional<size_t> best;
    double best_recall = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      if (!runs[i]) continue;
      const double recall = eval::evaluate(*runs[i], qrels, &train_qids).recall_1000;
      if (!best || recall > best_recall) {
        best = i;
        best_recall = recall;
      }
    }
    if (!best) fail(ErrorCategory::kPipeline, "every grid point failed; nothing to select for fold " + fold_id);
    FoldResult fr;
    fr.fold_id = fold_id;
    fr.chosen = points[*best];
    fr.train_recall = best_recall;
    fr.test = eval::evaluate(*runs[*best], qrels, &test_qids);
    result.folds.push_back(std::move(fr));
    if (result.combined.tag.empty()) result.combined.tag = "cv-" + runs[*best]->tag;

    const std::set<std::string> test_set(test_qids.begin(), test_qids.end());
    for (const auto& q : runs[*best]->queries) {
      if (test_set.contains(q.qid)) result.combined.queries.push_back(q);
    }
  }
  std::vector<std::string> all_qids;
  for (const auto& [id, qids] : folds) all_qids.insert(all_qids.end(), qids.begin(), qids.end());
  result.aggregate = eval::evaluate(result.combined, qrels, &all_qids);
  return result;
}

}  // namespace grm::tuning
