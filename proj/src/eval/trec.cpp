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

#include "grm/eval/trec.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "grm/error.hpp"

namespace grm::eval {

void Qrels::add(const std::string& qid, const std::string& docid, int grade) {
  auto& j = by_qid_[qid];
  if (!j.emplace(docid, grade).second) {
    fail(ErrorCategory::kFormat, "duplicate judgment for (" + qid + ", " + docid + ")");
  }
  max_grade_ = std::max(max_grade_, grade);
  ++count_;
}

const Judgments* Qrels::judgments(const std::string& qid) const {
  auto it = by_qid_.find(qid);
  return it == by_qid_.end() ? nullptr : &it->second;
}

std::optional<int> Qrels::grade(const std::string& qid, const std::string& docid) const {
  const auto* j = judgments(qid);
  if (j == nullptr) return std::nullopt;
  auto it = j->find(docid);
  if (it == j->end()) return std::nullopt;
  return it->second;
}

size_t Qrels::relevant_count(const std::string& qid) const {
  const auto* j = judgments(qid);
  if (j == nullptr) return 0;
  size_t n = 0;
  for (const auto& [docid, g] : *j) n += g >= 1 ? 1 : 0;
  return n;
}

std::vector<std::string> Qrels::qids() const {
  std::vector<std::string> out;
  out.reserve(by_qid_.size());
  for (const auto& [qid, j] : by_qid_) out.push_back(qid);
  return out;
}

Qrels parse_qrels(std::istream& in, const std::string& source) {
  Qrels qrels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string qid, iter, docid, grade_text, extra;
    if (!(fields >> qid)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!(fields >> iter >> docid >> grade_text) || (fields >> extra)) {
      fail(ErrorCategory::kFormat, where + ": expected 'qid 0 docid grade'");
    }
    char* end = nullptr;
    errno = 0;
    const long grade = std::strtol(grade_text.c_str(), &end, 10);
    if (*end != '\0' || errno != 0) fail(ErrorCategory::kFormat, where + ": bad grade '" + grade_text + "'");
    try {
      qrels.add(qid, docid, static_cast<int>(grade));
    } catch (const Error& e) {
      fail(ErrorCategory::kFormat, where + ": " + e.what());
    }
  }
  return qrels;
}

Qrels read_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open qrels file: " + path);
  return parse_qrels(in, path);
}

// ---------------------------------------------------------------------------

const QueryRanking* Run::find(const std::string& qid) const {
  for (const auto& q : queries) {
    if (q.qid == qid) return &q;
  }
  return nullptr;
}

void write_run(const Run& run, std::ostream& out) {
  const std::string tag = run.tag.empty() ? "grm" : run.tag;
  char score[64];
  for (const auto& q : run.queries) {
    size_t rank = 0;
    for (const auto& d : q.docs) {
      std::snprintf(score, sizeof(score), "%.6f", d.score);
      out << q.qid << " Q0 " << d.docid << ' ' << ++rank << ' ' << score << ' ' << tag << '\n';
    }
  }
}

void write_run_file(const Run& run, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write run file: " + path);
  write_run(run, out);
  out.flush();
  if (!out) fail(ErrorCategory::kIo, "failed writing run file: " + path);
}

Run parse_run(std::istream& in, const std::string& source) {
  Run run;
  std::unordered_set<std::string> finished_qids;
  std::unordered_set<std::string> seen_docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string qid, q0, docid, rank_text, score_text, tag, extra;
    if (!(fields >> qid)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!(fields >> q0 >> docid >> rank_text >> score_text >> tag) || (fields >> extra)) {
      fail(ErrorCategory::kFormat, where + ": expected 'qid Q0 docid rank score tag'");
    }
    char* end = nullptr;
    const long rank = std::strtol(rank_text.c_str(), &end, 10);
    if (*end != '\0') fail(ErrorCategory::kFormat, where + ": bad rank '" + rank_text + "'");
    const double score = std::strtod(score_text.c_str(), &end);
    if (*end != '\0' || !std::isfinite(score)) {
      fail(ErrorCategory::kFormat, where + ": bad score '" + score_text + "'");
    }
    if (run.queries.empty() || run.queries.back().qid != qid) {
      if (!run.queries.empty()) finished_qids.insert(run.queries.back().qid);
      if (finished_qids.contains(qid)) {
        fail(ErrorCategory::kFormat, where + ": entries for qid " + qid + " are not contiguous");
      }
      run.queries.push_back({qid, {}});
      seen_docs.clear();
    }
    auto& docs = run.queries.back().docs;
    if (rank != static_cast<long>(docs.size()) + 1) {
      fail(ErrorCategory::kFormat, where + ": expected rank " + std::to_string(docs.size() + 1));
    }
    if (!docs.empty() && score > docs.back().score) {
      fail(ErrorCategory::kFormat, where + ": scores must be non-increasing within a qid");
    }
    if (!seen_docs.insert(docid).second) {
      fail(ErrorCategory::kFormat, where + ": duplicate docid " + docid + " for qid " + qid);
    }
    if (run.tag.empty()) run.tag = tag;
    docs.push_back({docid, score});
  }
  return run;
}

Run read_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open run file: " + path);
  return parse_run(in, path);
}

}  // namespace grm::eval
