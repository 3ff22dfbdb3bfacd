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

#include "grm/index/document.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "grm/error.hpp"

namespace grm::index {

using nlohmann::json;

std::string Document::full_text() const {
  if (title.empty()) return body;
  if (body.empty()) return title;
  return title + "\n" + body;
}

void validate_document(const Document& doc) {
  if (doc.docid.empty()) fail(ErrorCategory::kFormat, "document with empty docid");
  if (doc.title.empty() && doc.body.empty()) {
    fail(ErrorCategory::kFormat, "document " + doc.docid + " has neither title nor body");
  }
}

CorpusFormat parse_corpus_format(std::string_view name, std::string_view path) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "trectext") return CorpusFormat::kTrecText;
  if (name == "auto") {
    if (path.ends_with(".jsonl") || path.ends_with(".json")) return CorpusFormat::kJsonl;
    return CorpusFormat::kTrecText;
  }
  fail(ErrorCategory::kConfig,
       "unknown corpus format '" + std::string(name) + "' (expected jsonl|trectext|auto)");
}

void read_jsonl_corpus(const std::string& path, const DocumentCallback& on_document) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open corpus file: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCategory::kFormat, where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) fail(ErrorCategory::kFormat, where + ": expected a JSON object");
    Document doc;
    try {
      if (!obj.contains("docid") || !obj.contains("body")) {
        fail(ErrorCategory::kFormat, where + ": missing \"docid\" or \"body\"");
      }
      doc.docid = obj.at("docid").get<std::string>();
      doc.body = obj.at("body").get<std::string>();
      if (auto it = obj.find("title"); it != obj.end() && !it->is_null()) {
        doc.title = it->get<std::string>();
      }
    } catch (const json::type_error& e) {
      fail(ErrorCategory::kFormat, where + ": " + e.what());
    }
    try {
      validate_document(doc);
    } catch (const Error& e) {
      fail(ErrorCategory::kFormat, where + ": " + e.what());
    }
    on_document(std::move(doc));
  }
}

namespace {

std::string strip_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') {
      in_tag = true;
      out.push_back(' ');
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out.push_back(c);
    }
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Concatenated contents of every <tag>...</tag> block in `doc`.
std::string collect_blocks(std::string_view doc, std::string_view tag, bool* found) {
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag) + ">";
  std::string out;
  size_t pos = 0;
  *found = false;
  while (true) {
    size_t start = doc.find(open, pos);
    if (start == std::string_view::npos) break;
    const size_t after_name = start + open.size();
    if (after_name < doc.size() && doc[after_name] != '>' && doc[after_name] != ' ') {
      pos = after_name;
      continue;
    }
    const size_t content = doc.find('>', after_name);
    if (content == std::string_view::npos) break;
    const size_t end = doc.find(close, content + 1);
    if (end == std::string_view::npos) break;
    *found = true;
    if (!out.empty()) out.push_back('\n');
    out += doc.substr(content + 1, end - content - 1);
    pos = end + close.size();
  }
  return out;
}

}  // namespace

void read_trectext_corpus(const std::string& path, const DocumentCallback& on_document) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open corpus file: " + path);
  std::string line;
  std::string buffer;
  size_t line_no = 0;
  size_t doc_start_line = 0;
  bool in_doc = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!in_doc) {
      const auto open = line.find("<DOC>");
      if (open == std::string::npos) continue;
      in_doc = true;
      doc_start_line = line_no;
      buffer = line.substr(open + 5);
      buffer.push_back('\n');
    } else {
      buffer += line;
      buffer.push_back('\n');
    }
    const auto close = buffer.find("</DOC>");
    if (close == std::string::npos) continue;
    const std::string_view raw(buffer.data(), close);
    const std::string where = path + ":" + std::to_string(doc_start_line);
    bool found = false;
    Document doc;
    doc.docid = trim(collect_blocks(raw, "DOCNO", &found));
    if (!found || doc.docid.empty()) fail(ErrorCategory::kFormat, where + ": <DOC> without <DOCNO>");
    bool has_title = false;
    std::string title = collect_blocks(raw, "TITLE", &has_title);
    if (!has_title) title = collect_blocks(raw, "HEADLINE", &has_title);
    doc.title = trim(strip_markup(title));
    bool has_text = false;
    std::string text = collect_blocks(raw, "TEXT", &has_text);
    if (!has_text) {
      // No TEXT block: everything except the DOCNO.
      std::string rest(raw);
      const auto a = rest.find("<DOCNO>");
      const auto b = rest.find("</DOCNO>");
      if (a != std::string::npos && b != std::string::npos) rest.erase(a, b + 8 - a);
      text = rest;
    }
    doc.body = trim(strip_markup(text));
    try {
      validate_document(doc);
    } catch (const Error& e) {
      fail(ErrorCategory::kFormat, where + ": " + e.what());
    }
    on_document(std::move(doc));
    in_doc = false;
    buffer.clear();
  }
  if (in_doc) {
    fail(ErrorCategory::kFormat,
         path + ":" + std::to_string(doc_start_line) + ": unterminated <DOC>");
  }
}

void read_corpus(const std::string& path, CorpusFormat format,
                 const DocumentCallback& on_document) {
  if (format == CorpusFormat::kJsonl) {
    read_jsonl_corpus(path, on_document);
  } else {
    read_trectext_corpus(path, on_document);
  }
}

std::vector<Document> read_corpus(const std::string& path, CorpusFormat format) {
  std::vector<Document> docs;
  read_corpus(path, format, [&](Document&& d) { docs.push_back(std::move(d)); });
  return docs;
}

}  // namespace grm::index
