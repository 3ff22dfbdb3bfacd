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

#ifndef GRM_EVAL_TREC_HPP_
#define GRM_EVAL_TREC_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grm/index/inverted_index.hpp"

namespace grm::eval {

// docid -> grade for one query.
using Judgments = std::unordered_map<std::string, int>;

// Relevance judgments. Grades may be negative; a document counts as relevant
// when its grade is >= 1.
class Qrels {
 public:
  void add(const std::string& qid, const std::string& docid, int grade);

  // nullptr when the query has no judgments at all.
  const Judgments* judgments(const std::string& qid) const;
  std::optional<int> grade(const std::string& qid, const std::string& docid) const;
  size_t relevant_count(const std::string& qid) const;
  // Highest grade anywhere in the file (0 when empty).
  int max_grade() const { return max_grade_; }
  // Query ids in ascending order.
  std::vector<std::string> qids() const;
  size_t size() const { return count_; }

 private:
  std::map<std::string, Judgments> by_qid_;
  int max_grade_ = 0;
  size_t count_ = 0;
};

// "qid 0 docid grade" per line, whitespace separated. Duplicate
// (qid, docid) pairs are kFormat errors.
Qrels read_qrels(const std::string& path);
Qrels parse_qrels(std::istream& in, const std::string& source);

struct QueryRanking {
  std::string qid;
  std::vector<index::ScoredDoc> docs;  // rank order
};

struct Run {
  std::string tag;
  std::vector<QueryRanking> queries;  // file order

  const QueryRanking* find(const std::string& qid) const;
};

// "qid Q0 docid rank score tag" lines, ranks from 1, score with six decimals.
void write_run(const Run& run, std::ostream& out);
void write_run_file(const Run& run, const std::string& path);

// Validates that each qid occupies one contiguous block, ranks are 1..n,
// scores are non-increasing and docids are unique within a qid.
Run read_run(const std::string& path);
Run parse_run(std::istream& in, const std::string& source);

}  // namespace grm::eval

#endif  // GRM_EVAL_TREC_HPP_
