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

#ifndef GRM_INDEX_DOCUMENT_HPP_
#define GRM_INDEX_DOCUMENT_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace grm::index {

struct Document {
  std::string docid;
  std::string title;
  std::string body;

  // Title and body joined for analysis.
  std::string full_text() const;
};

// Throws kFormat if docid is empty or both title and body are empty.
void validate_document(const Document& doc);

enum class CorpusFormat { kJsonl, kTrecText };

// "jsonl" or "trectext"; "auto" picks from the file extension (.jsonl/.json
// versus anything else).
CorpusFormat parse_corpus_format(std::string_view name, std::string_view path);

using DocumentCallback = std::function<void(Document&&)>;

// {"docid": ..., "title": ... (optional), "body": ...} per line. Errors carry
// the 1-based line number.
void read_jsonl_corpus(const std::string& path, const DocumentCallback& on_document);

// <DOC><DOCNO>id</DOCNO>...<TEXT>...</TEXT></DOC>. Multiple TEXT blocks are
// concatenated; an optional TITLE or HEADLINE block becomes the title. Inner
// markup is stripped.
void read_trectext_corpus(const std::string& path, const DocumentCallback& on_document);

void read_corpus(const std::string& path, CorpusFormat format,
                 const DocumentCallback& on_document);

std::vector<Document> read_corpus(const std::string& path, CorpusFormat format);

}  // namespace grm::index

#endif  // GRM_INDEX_DOCUMENT_HPP_
