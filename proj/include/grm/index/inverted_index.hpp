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

#ifndef GRM_INDEX_INVERTED_INDEX_HPP_
#define GRM_INDEX_INVERTED_INDEX_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "grm/index/document.hpp"
#include "grm/language_model.hpp"
#include "grm/text/analyzer.hpp"

namespace grm::index {

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  // k1 >= 0 and b in [0, 1]; throws kConfig otherwise.
  void validate() const;
};

struct ScoredDoc {
  std::string docid;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

struct Posting {
  uint32_t doc;  // ordinal, see InvertedIndex::docid()
  uint32_t tf;
};

struct TermCount {
  uint32_t term;
  uint32_t tf;
};

// Query terms with non-negative weights. Repeated terms are summed.
using WeightedQuery = std::vector<std::pair<std::string, double>>;

// Raw term-frequency bag of a token sequence, sorted by term.
WeightedQuery bag_of_words(std::span<const std::string> tokens);

// Immutable term -> postings structure with collection statistics.
//
// Document ordinals follow ascending docid order and term ids follow
// ascending term order, so the structure (and every search result) is
// independent of the order in which documents were added.
class InvertedIndex {
 public:
  class Builder {
   public:
    explicit Builder(text::AnalyzerConfig config = text::AnalyzerConfig::english_default());

    // Throws kFormat on an invalid document or a duplicate docid.
    void add(const Document& doc);
    void add_analyzed(std::string docid, std::span<const std::string> tokens);

    const text::Analyzer& analyzer() const { return analyzer_; }

    InvertedIndex finish() &&;

   private:
    struct PendingDoc {
      std::string docid;
      std::vector<std::pair<uint32_t, uint32_t>> counts;  // (local term id, tf)
      uint32_t length;
    };

    text::Analyzer analyzer_;
    std::unordered_map<std::string, uint32_t> local_terms_;
    std::vector<std::string> local_vocab_;
    std::unordered_set<std::string> seen_docids_;
    std::vector<PendingDoc> docs_;
  };

  InvertedIndex() = default;
  InvertedIndex(const InvertedIndex& other);
  InvertedIndex& operator=(const InvertedIndex& other);
  InvertedIndex(InvertedIndex&&) noexcept = default;
  InvertedIndex& operator=(InvertedIndex&&) noexcept = default;

  // Analysis may run on `threads` workers; the result does not depend on it.
  static InvertedIndex build(std::span<const Document> documents,
                             const text::AnalyzerConfig& config =
                                 text::AnalyzerConfig::english_default(),
                             unsigned threads = 1);

  size_t doc_count() const { return docids_.size(); }
  size_t vocabulary_size() const { return terms_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  uint64_t total_terms() const { return total_terms_; }

  const text::Analyzer& analyzer() const { return analyzer_; }

  std::optional<uint32_t> term_id(std::string_view term) const;
  const std::string& term(uint32_t id) const { return terms_[id]; }
  uint32_t document_frequency(uint32_t term_id) const;
  uint64_t collection_frequency(uint32_t term_id) const { return collection_freq_[term_id]; }

  std::optional<uint32_t> doc_ordinal(std::string_view docid) const;
  const std::string& docid(uint32_t ordinal) const { return docids_[ordinal]; }
  uint32_t doc_length(uint32_t ordinal) const { return doc_lengths_[ordinal]; }

  std::span<const Posting> postings(uint32_t term_id) const;
  // Analyzed token multiset of a document, sorted by term id.
  std::span<const TermCount> doc_terms(uint32_t ordinal) const;

  // ln((N - df + 0.5) / (df + 0.5) + 1).
  double idf(uint32_t term_id) const;

  // Top-k documents by sum over query terms of weight * BM25 term score.
  // Documents scoring zero are omitted; ties go to the smaller docid.
  std::vector<ScoredDoc> search(const WeightedQuery& query, const Bm25Params& params,
                                size_t k) const;

  // The same score `search` would assign to one document, summed in the same
  // order so the values compare bit-for-bit.
  double score_document(const WeightedQuery& query, uint32_t ordinal,
                        const Bm25Params& params) const;

  // Throws kIo / kFormat; a file written by a different format version is
  // rejected.
  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  static constexpr uint32_t kFormatVersion = 1;

 private:
  struct ResolvedTerm {
    uint32_t id;
    double weight;
  };
  std::vector<ResolvedTerm> resolve(const WeightedQuery& query) const;
  double term_score(const ResolvedTerm& t, uint32_t tf, uint32_t doc_len,
                    const Bm25Params& params) const;
  void rebuild_lookup();

  text::Analyzer analyzer_;
  std::vector<std::string> terms_;
  std::vector<uint64_t> collection_freq_;
  std::vector<uint64_t> posting_offsets_;  // size V + 1
  std::vector<Posting> postings_;
  std::vector<std::string> docids_;
  std::vector<uint32_t> doc_lengths_;
  std::vector<uint64_t> doc_offsets_;  // size N + 1
  std::vector<TermCount> doc_store_;
  uint64_t total_terms_ = 0;
  double avg_doc_length_ = 0.0;

  std::unordered_map<std::string_view, uint32_t> term_lookup_;
  std::unordered_map<std::string_view, uint32_t> doc_lookup_;
};

std::vector<ScoredDoc> bm25_search(std::span<const std::string> query_tokens,
                                   const InvertedIndex& index, const Bm25Params& params,
                                   size_t k);

// Uses a (generated) document's analyzed tokens as a query bag; repeated
// tokens multiply the term's contribution by their count.
std::vector<ScoredDoc> doc_as_query_search(std::span<const std::string> source_tokens,
                                           const InvertedIndex& index,
                                           const Bm25Params& params, size_t k);

// tf(w, D) / |D| over the stored token multiset. Throws kNotFound for an
// unknown docid.
LanguageModel doc_language_model(std::string_view docid, const InvertedIndex& index);

}  // namespace grm::index

#endif  // GRM_INDEX_INVERTED_INDEX_HPP_
