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

// On-disk layout (all integers little-endian, strings are u32 length + bytes):
//
//   "GRMINDEX"                      8-byte magic
//   u32 format version              InvertedIndex::kFormatVersion
//   u32 stemmer                     0 = none, 1 = porter
//   u8  lowercase
//   u64 analyzer fingerprint
//   u32 stopword count, then each stopword
//   u64 document count N, then per document: docid, u32 length
//   u64 vocabulary size V, then per term: term, u64 collection frequency
//   u64 posting count P, u64[V + 1] posting offsets, P x (u32 doc, u32 tf)
//   u64 store count S,   u64[N + 1] document offsets, S x (u32 term, u32 tf)
//   u64 total tokens
//   "GRMEND\0\0"                    8-byte trailer

#include <cstring>
#include <fstream>

#include "grm/error.hpp"
#include "grm/index/inverted_index.hpp"

namespace grm::index {
namespace {

constexpr char kMagic[8] = {'G', 'R', 'M', 'I', 'N', 'D', 'E', 'X'};
constexpr char kTrailer[8] = {'G', 'R', 'M', 'E', 'N', 'D', '\0', '\0'};

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) fail(ErrorCategory::kIo, "cannot write index file: " + path);
  }

  template <typename T>
  void uint(T v) {
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }

  void str(const std::string& s) {
    uint<uint32_t>(static_cast<uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void raw(const char* data, size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

  void close() {
    out_.flush();
    if (!out_) fail(ErrorCategory::kIo, "failed writing index file: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) fail(ErrorCategory::kIo, "cannot open index file: " + path);
  }

  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)];
    read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::string str() {
    const auto n = uint<uint32_t>();
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  void read(char* dst, size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      fail(ErrorCategory::kFormat, "truncated index file: " + path_);
    }
  }

  // Guards allocations against corrupt counts.
  uint64_t count(uint64_t limit, const char* what) {
    const auto n = uint<uint64_t>();
    if (n > limit) fail(ErrorCategory::kFormat, std::string("corrupt ") + what + " count in " + path_);
    return n;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

constexpr uint64_t kSanityLimit = uint64_t{1} << 40;

}  // namespace

void InvertedIndex::save(const std::string& path) const {
  Writer w(path);
  w.raw(kMagic, sizeof(kMagic));
  w.uint<uint32_t>(kFormatVersion);
  const auto& cfg = analyzer_.config();
  w.uint<uint32_t>(static_cast<uint32_t>(cfg.stemmer));
  w.uint<uint8_t>(cfg.lowercase ? 1 : 0);
  w.uint<uint64_t>(cfg.fingerprint());
  w.uint<uint32_t>(static_cast<uint32_t>(cfg.stopwords.size()));
  for (const auto& s : cfg.stopwords) w.str(s);

  w.uint<uint64_t>(docids_.size());
  for (size_t d = 0; d < docids_.size(); ++d) {
    w.str(docids_[d]);
    w.uint<uint32_t>(doc_lengths_[d]);
  }
  w.uint<uint64_t>(terms_.size());
  for (size_t t = 0; t < terms_.size(); ++t) {
    w.str(terms_[t]);
    w.uint<uint64_t>(collection_freq_[t]);
  }
  w.uint<uint64_t>(postings_.size());
  for (auto off : posting_offsets_) w.uint<uint64_t>(off);
  for (const auto& p : postings_) {
    w.uint<uint32_t>(p.doc);
    w.uint<uint32_t>(p.tf);
  }
  w.uint<uint64_t>(doc_store_.size());
  for (auto off : doc_offsets_) w.uint<uint64_t>(off);
  for (const auto& c : doc_store_) {
    w.uint<uint32_t>(c.term);
    w.uint<uint32_t>(c.tf);
  }
  w.uint<uint64_t>(total_terms_);
  w.raw(kTrailer, sizeof(kTrailer));
  w.close();
}

InvertedIndex InvertedIndex::load(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCategory::kFormat, "not a GRM index file: " + path);
  }
  const auto version = r.uint<uint32_t>();
  if (version != kFormatVersion) {
    fail(ErrorCategory::kFormat, "index format version mismatch in " + path + ": file has " +
                                     std::to_string(version) + ", expected " +
                                     std::to_string(kFormatVersion));
  }
  text::AnalyzerConfig cfg;
  const auto stemmer = r.uint<uint32_t>();
  if (stemmer > 1) fail(ErrorCategory::kFormat, "unknown stemmer id in " + path);
  cfg.stemmer = static_cast<text::StemmerKind>(stemmer);
  cfg.lowercase = r.uint<uint8_t>() != 0;
  const auto fingerprint = r.uint<uint64_t>();
  const auto n_stop = r.uint<uint32_t>();
  for (uint32_t i = 0; i < n_stop; ++i) cfg.stopwords.push_back(r.str());
  if (cfg.fingerprint() != fingerprint) {
    fail(ErrorCategory::kFormat, "analyzer fingerprint mismatch in " + path);
  }

  InvertedIndex index;
  index.analyzer_ = text::Analyzer(cfg);
  const auto n_docs = r.count(kSanityLimit, "document");
  index.docids_.reserve(n_docs);
  index.doc_lengths_.reserve(n_docs);
  for (uint64_t d = 0; d < n_docs; ++d) {
    index.docids_.push_back(r.str());
    index.doc_lengths_.push_back(r.uint<uint32_t>());
  }
  const auto n_terms = r.count(kSanityLimit, "term");
  index.terms_.reserve(n_terms);
  index.collection_freq_.reserve(n_terms);
  for (uint64_t t = 0; t < n_terms; ++t) {
    index.terms_.push_back(r.str());
    index.collection_freq_.push_back(r.uint<uint64_t>());
  }
  const auto n_postings = r.count(kSanityLimit, "posting");
  index.posting_offsets_.resize(n_terms + 1);
  for (auto& off : index.posting_offsets_) off = r.uint<uint64_t>();
  index.postings_.resize(n_postings);
  for (auto& p : index.postings_) {
    p.doc = r.uint<uint32_t>();
    p.tf = r.uint<uint32_t>();
    if (p.doc >= n_docs) fail(ErrorCategory::kFormat, "posting references unknown document in " + path);
  }
  const auto n_store = r.count(kSanityLimit, "store");
  index.doc_offsets_.resize(n_docs + 1);
  for (auto& off : index.doc_offsets_) off = r.uint<uint64_t>();
  index.doc_store_.resize(n_store);
  for (auto& c : index.doc_store_) {
    c.term = r.uint<uint32_t>();
    c.tf = r.uint<uint32_t>();
    if (c.term >= n_terms) fail(ErrorCategory::kFormat, "store references unknown term in " + path);
  }
  index.total_terms_ = r.uint<uint64_t>();
  char trailer[8];
  r.read(trailer, sizeof(trailer));
  if (std::memcmp(trailer, kTrailer, sizeof(kTrailer)) != 0) {
    fail(ErrorCategory::kFormat, "missing trailer in index file: " + path);
  }
  if (index.posting_offsets_.front() != 0 || index.posting_offsets_.back() != n_postings ||
      index.doc_offsets_.front() != 0 || index.doc_offsets_.back() != n_store) {
    fail(ErrorCategory::kFormat, "inconsistent offsets in index file: " + path);
  }
  index.avg_doc_length_ =
      n_docs == 0 ? 0.0 : static_cast<double>(index.total_terms_) / static_cast<double>(n_docs);
  index.rebuild_lookup();
  return index;
}

}  // namespace grm::index
