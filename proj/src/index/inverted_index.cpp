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

#include "grm/index/inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include "grm/error.hpp"

namespace grm::index {

void Bm25Params::validate() const {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) {
    fail(ErrorCategory::kConfig, "bm25.k1 must be a finite value >= 0");
  }
  if (!(b >= 0.0 && b <= 1.0)) fail(ErrorCategory::kConfig, "bm25.b must be in [0, 1]");
}

WeightedQuery bag_of_words(std::span<const std::string> tokens) {
  std::map<std::string, double, std::less<>> counts;
  for (const auto& t : tokens) counts[t] += 1.0;
  return WeightedQuery(counts.begin(), counts.end());
}

// ---------------------------------------------------------------------------
// Builder

InvertedIndex::Builder::Builder(text::AnalyzerConfig config) : analyzer_(std::move(config)) {}

void InvertedIndex::Builder::add(const Document& doc) {
  validate_document(doc);
  const auto tokens = analyzer_.analyze(doc.full_text());
  add_analyzed(doc.docid, tokens);
}

void InvertedIndex::Builder::add_analyzed(std::string docid, std::span<const std::string> tokens) {
  if (docid.empty()) fail(ErrorCategory::kFormat, "document with empty docid");
  if (!seen_docids_.insert(docid).second) {
    fail(ErrorCategory::kFormat, "duplicate docid: " + docid);
  }
  std::unordered_map<uint32_t, uint32_t> tf;
  for (const auto& token : tokens) {
    auto [it, inserted] = local_terms_.try_emplace(token, static_cast<uint32_t>(local_vocab_.size()));
    if (inserted) local_vocab_.push_back(token);
    ++tf[it->second];
  }
  PendingDoc pending{std::move(docid), {tf.begin(), tf.end()}, static_cast<uint32_t>(tokens.size())};
  docs_.push_back(std::move(pending));
}

InvertedIndex InvertedIndex::Builder::finish() && {
  InvertedIndex index;
  index.analyzer_ = analyzer_;

  // Final term ids follow lexicographic order.
  std::vector<uint32_t> order(local_vocab_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](uint32_t a, uint32_t b) { return local_vocab_[a] < local_vocab_[b]; });
  std::vector<uint32_t> remap(local_vocab_.size());
  index.terms_.reserve(order.size());
  for (uint32_t final_id = 0; final_id < order.size(); ++final_id) {
    remap[order[final_id]] = final_id;
    index.terms_.push_back(std::move(local_vocab_[order[final_id]]));
  }

  std::sort(docs_.begin(), docs_.end(),
            [](const PendingDoc& a, const PendingDoc& b) { return a.docid < b.docid; });

  const size_t n_docs = docs_.size();
  const size_t n_terms = index.terms_.size();
  index.docids_.reserve(n_docs);
  index.doc_lengths_.reserve(n_docs);
  index.doc_offsets_.reserve(n_docs + 1);
  index.doc_offsets_.push_back(0);
  index.collection_freq_.assign(n_terms, 0);
  std::vector<uint64_t> df(n_terms, 0);

  for (auto& doc : docs_) {
    std::vector<TermCount> counts;
    counts.reserve(doc.counts.size());
    for (const auto& [local, tf] : doc.counts) counts.push_back({remap[local], tf});
    std::sort(counts.begin(), counts.end(),
              [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    for (const auto& c : counts) {
      ++df[c.term];
      index.collection_freq_[c.term] += c.tf;
    }
    index.doc_store_.insert(index.doc_store_.end(), counts.begin(), counts.end());
    index.doc_offsets_.push_back(index.doc_store_.size());
    index.docids_.push_back(std::move(doc.docid));
    index.doc_lengths_.push_back(doc.length);
    index.total_terms_ += doc.length;
  }

  index.posting_offsets_.assign(n_terms + 1, 0);
  for (size_t t = 0; t < n_terms; ++t) index.posting_offsets_[t + 1] = index.posting_offsets_[t] + df[t];
  index.postings_.resize(index.posting_offsets_.back());
  std::vector<uint64_t> cursor(index.posting_offsets_.begin(), index.posting_offsets_.end() - 1);
  // Documents are visited in ordinal order, so each posting list ends up
  // sorted by docid.
  for (uint32_t d = 0; d < n_docs; ++d) {
    for (const auto& c : index.doc_terms(d)) index.postings_[cursor[c.term]++] = {d, c.tf};
  }

  index.avg_doc_length_ =
      n_docs == 0 ? 0.0 : static_cast<double>(index.total_terms_) / static_cast<double>(n_docs);
  index.rebuild_lookup();
  docs_.clear();
  return index;
}

InvertedIndex InvertedIndex::build(std::span<const Document> documents,
                                   const text::AnalyzerConfig& config, unsigned threads) {
  Builder builder(config);
  for (const auto& d : documents) validate_document(d);
  if (threads <= 1 || documents.size() < 2) {
    for (const auto& d : documents) builder.add(d);
    return std::move(builder).finish();
  }
  const size_t n_chunks = std::min<size_t>(threads, documents.size());
  const size_t chunk = (documents.size() + n_chunks - 1) / n_chunks;
  std::vector<std::future<std::vector<std::vector<std::string>>>> parts;
  for (size_t start = 0; start < documents.size(); start += chunk) {
    const size_t end = std::min(documents.size(), start + chunk);
    parts.push_back(std::async(std::launch::async, [&, start, end] {
      std::vector<std::vector<std::string>> out;
      out.reserve(end - start);
      for (size_t i = start; i < end; ++i) {
        out.push_back(builder.analyzer().analyze(documents[i].full_text()));
      }
      return out;
    }));
  }
  size_t i = 0;
  for (auto& part : parts) {
    for (auto& tokens : part.get()) {
      builder.add_analyzed(documents[i].docid, tokens);
      ++i;
    }
  }
  return std::move(builder).finish();
}

// ---------------------------------------------------------------------------
// Accessors

InvertedIndex::InvertedIndex(const InvertedIndex& other)
    : analyzer_(other.analyzer_),
      terms_(other.terms_),
      collection_freq_(other.collection_freq_),
      posting_offsets_(other.posting_offsets_),
      postings_(other.postings_),
      docids_(other.docids_),
      doc_lengths_(other.doc_lengths_),
      doc_offsets_(other.doc_offsets_),
      doc_store_(other.doc_store_),
      total_terms_(other.total_terms_),
      avg_doc_length_(other.avg_doc_length_) {
  rebuild_lookup();
}

InvertedIndex& InvertedIndex::operator=(const InvertedIndex& other) {
  if (this != &other) {
    InvertedIndex copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void InvertedIndex::rebuild_lookup() {
  term_lookup_.clear();
  doc_lookup_.clear();
  term_lookup_.reserve(terms_.size());
  doc_lookup_.reserve(docids_.size());
  for (uint32_t i = 0; i < terms_.size(); ++i) term_lookup_.emplace(terms_[i], i);
  for (uint32_t i = 0; i < docids_.size(); ++i) doc_lookup_.emplace(docids_[i], i);
}

std::optional<uint32_t> InvertedIndex::term_id(std::string_view term) const {
  auto it = term_lookup_.find(term);
  if (it == term_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<uint32_t> InvertedIndex::doc_ordinal(std::string_view docid) const {
  auto it = doc_lookup_.find(docid);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

uint32_t InvertedIndex::document_frequency(uint32_t term_id) const {
  return static_cast<uint32_t>(posting_offsets_[term_id + 1] - posting_offsets_[term_id]);
}

std::span<const Posting> InvertedIndex::postings(uint32_t term_id) const {
  return {postings_.data() + posting_offsets_[term_id],
          postings_.data() + posting_offsets_[term_id + 1]};
}

std::span<const TermCount> InvertedIndex::doc_terms(uint32_t ordinal) const {
  return {doc_store_.data() + doc_offsets_[ordinal], doc_store_.data() + doc_offsets_[ordinal + 1]};
}

double InvertedIndex::idf(uint32_t term_id) const {
  const double n = static_cast<double>(doc_count());
  const double df = static_cast<double>(document_frequency(term_id));
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

// ---------------------------------------------------------------------------
// Scoring

std::vector<InvertedIndex::ResolvedTerm> InvertedIndex::resolve(const WeightedQuery& query) const {
  std::map<uint32_t, double> merged;
  for (const auto& [term, weight] : query) {
    if (!(weight > 0.0)) continue;
    if (auto id = term_id(term)) merged[*id] += weight;
  }
  std::vector<ResolvedTerm> out;
  out.reserve(merged.size());
  for (const auto& [id, w] : merged) out.push_back({id, w});
  return out;
}

double InvertedIndex::term_score(const ResolvedTerm& t, uint32_t tf, uint32_t doc_len,
                                 const Bm25Params& params) const {
  const double avgdl = avg_doc_length_ > 0.0 ? avg_doc_length_ : 1.0;
  const double ftf = static_cast<double>(tf);
  const double norm = params.k1 * (1.0 - params.b + params.b * static_cast<double>(doc_len) / avgdl);
  return t.weight * idf(t.id) * (ftf * (params.k1 + 1.0)) / (ftf + norm);
}

std::vector<ScoredDoc> InvertedIndex::search(const WeightedQuery& query, const Bm25Params& params,
                                             size_t k) const {
  if (k == 0 || doc_count() == 0) return {};
  const auto terms = resolve(query);
  if (terms.empty()) return {};

  std::vector<double> acc(doc_count(), 0.0);
  std::vector<uint32_t> touched;
  for (const auto& t : terms) {
    for (const auto& p : postings(t.id)) {
      if (acc[p.doc] == 0.0) touched.push_back(p.doc);
      acc[p.doc] += term_score(t, p.tf, doc_lengths_[p.doc], params);
    }
  }

  std::vector<std::pair<double, uint32_t>> hits;
  hits.reserve(touched.size());
  for (uint32_t d : touched) {
    if (acc[d] > 0.0) hits.emplace_back(acc[d], d);
  }
  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back({docids_[hits[i].second], hits[i].first});
  return out;
}

double InvertedIndex::score_document(const WeightedQuery& query, uint32_t ordinal,
                                     const Bm25Params& params) const {
  const auto doc = doc_terms(ordinal);
  double score = 0.0;
  for (const auto& t : resolve(query)) {
    auto it = std::lower_bound(doc.begin(), doc.end(), t.id,
                               [](const TermCount& c, uint32_t id) { return c.term < id; });
    if (it != doc.end() && it->term == t.id) {
      score += term_score(t, it->tf, doc_lengths_[ordinal], params);
    }
  }
  return score;
}

std::vector<ScoredDoc> bm25_search(std::span<const std::string> query_tokens,
                                   const InvertedIndex& index, const Bm25Params& params,
                                   size_t k) {
  return index.search(bag_of_words(query_tokens), params, k);
}

std::vector<ScoredDoc> doc_as_query_search(std::span<const std::string> source_tokens,
                                           const InvertedIndex& index,
                                           const Bm25Params& params, size_t k) {
  if (source_tokens.empty()) return {};
  return index.search(bag_of_words(source_tokens), params, k);
}

LanguageModel doc_language_model(std::string_view docid, const InvertedIndex& index) {
  const auto ordinal = index.doc_ordinal(docid);
  if (!ordinal) fail(ErrorCategory::kNotFound, "unknown docid: " + std::string(docid));
  LanguageModel model;
  const double len = static_cast<double>(index.doc_length(*ordinal));
  if (len == 0.0) return model;
  for (const auto& c : index.doc_terms(*ordinal)) {
    model.emplace(index.term(c.term), static_cast<double>(c.tf) / len);
  }
  return model;
}

}  // namespace grm::index
