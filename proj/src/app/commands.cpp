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

#include "grm/app/commands.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include "grm/error.hpp"
#include "grm/eval/metrics.hpp"
#include "grm/eval/variance.hpp"
#include "grm/generation/chat_provider.hpp"
#include "grm/generation/generator.hpp"
#include "grm/index/document.hpp"
#include "grm/log.hpp"

namespace grm::app {

namespace {

// Exclusive advisory lock on an output file, held for the object's lifetime.
class FileLock {
 public:
  explicit FileLock(const std::string& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) fail(ErrorCategory::kIo, "cannot open output " + path + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fail(ErrorCategory::kIo, "output " + path + " is locked by another process");
    }
  }
  ~FileLock() { ::close(fd_); }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

  void replace_contents(std::string_view data) {
    if (::ftruncate(fd_, 0) != 0) fail(ErrorCategory::kIo, "cannot truncate " + path_);
    size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = ::pwrite(fd_, data.data() + done, data.size() - done, static_cast<off_t>(done));
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(ErrorCategory::kIo, "failed writing " + path_ + ": " + std::strerror(errno));
      }
      done += static_cast<size_t>(n);
    }
  }

 private:
  std::string path_;
  int fd_ = -1;
};

void emit(const Settings& s, const std::string& content, const Writer& out, std::string_view what) {
  if (s.output_path.empty()) {
    out(content);
    return;
  }
  FileLock lock(s.output_path);
  lock.replace_contents(content);
  out("wrote " + std::string(what) + " to " + s.output_path + "\n");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

index::InvertedIndex load_index(const Settings& s) {
  auto idx = index::InvertedIndex::load(Settings::require(s.index_path, "index.path"));
  if (idx.analyzer().config().fingerprint() != s.analyzer.fingerprint()) {
    fail(ErrorCategory::kConfig, "index " + s.index_path +
                                     " was built with a different analyzer configuration (analyzer.*)");
  }
  return idx;
}

std::vector<index::Document> load_corpus(const Settings& s) {
  const auto& path = Settings::require(s.corpus_path, "corpus.path");
  return index::read_corpus(path, index::parse_corpus_format(s.corpus_format, path));
}

std::map<std::string, std::vector<generation::GeneratedDocument>> load_pools(const Settings& s) {
  std::map<std::string, std::vector<generation::GeneratedDocument>> pools;
  for (auto& d : generation::read_pool_file(Settings::require(s.pool_path, "generation.pool_path"))) {
    if (d.round <= s.generation.g_rounds && d.subtopic_index <= s.generation.k_subtopics) {
      pools[d.qid].push_back(std::move(d));
    }
  }
  for (auto& [qid, docs] : pools) {
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  }
  return pools;
}

// Everything a retrieval command reads, loaded once.
struct Workspace {
  index::InvertedIndex index;
  eval::Qrels qrels;
  std::unique_ptr<rase::RelevanceScorer> scorer;
  std::unordered_map<std::string, std::string> texts;
  PipelineData data;
};

std::unique_ptr<Workspace> open_workspace(const Settings& s, bool need_pools, bool need_qrels) {
  auto ws = std::make_unique<Workspace>();
  ws->index = load_index(s);
  ws->data.index = &ws->index;
  ws->data.topics = generation::read_topics(Settings::require(s.topics_path, "topics.path"), s.query_variant);
  const bool grm = need_pools || s.run.method == RunMethod::kGrm;
  if (grm) ws->data.pools = load_pools(s);
  const auto estimator = s.run.estimator;
  if (need_qrels || (grm && estimator == rase::EstimatorKind::kGold)) {
    ws->qrels = eval::read_qrels(Settings::require(s.qrels_path, "qrels.path"));
    ws->data.sources.qrels = &ws->qrels;
  }
  if (grm && estimator == rase::EstimatorKind::kExternal) {
    if (!s.scores_path.empty()) {
      ws->scorer = std::make_unique<rase::ExternalScoresFile>(s.scores_path);
    } else if (!s.scorer_url.empty()) {
      rase::HttpRelevanceScorer::TextLookup lookup;
      if (!s.corpus_path.empty()) {
        for (auto& d : load_corpus(s)) ws->texts.emplace(d.docid, d.full_text());
        lookup = [w = ws.get()](const std::string& docid) {
          auto it = w->texts.find(docid);
          return it == w->texts.end() ? std::string() : it->second;
        };
      }
      ws->scorer = std::make_unique<rase::HttpRelevanceScorer>(s.scorer_url, lookup);
    } else {
      fail(ErrorCategory::kConfig, "rase.estimator=external needs rase.scores_path or rase.scorer_url");
    }
    ws->data.sources.external = ws->scorer.get();
  }
  ws->data.sources.index = &ws->index;
  if (grm) rase::check_sources(estimator, ws->data.sources);
  return ws;
}

std::string metric_cell(double value, bool improved) { return fmt("%.4f", value) + (improved ? "+" : " "); }

void warn_qid_mismatch(const eval::Run& run, const eval::Qrels& qrels, const std::string& path) {
  std::set<std::string> in_run;
  for (const auto& q : run.queries) {
    in_run.insert(q.qid);
    if (qrels.relevant_count(q.qid) == 0) log_warning(path + ": qid " + q.qid + " has no relevant judgments");
  }
  for (const auto& q : qrels.qids()) {
    if (qrels.relevant_count(q) > 0 && !in_run.contains(q)) {
      log_warning(path + ": qid " + q + " is judged but missing from the run (scored 0)");
    }
  }
}

}  // namespace

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

tuning::Grid parse_grid(std::string_view spec) {
  tuning::Grid g;
  std::istringstream in{std::string(spec)};
  std::string part;
  while (std::getline(in, part, ';')) {
    const auto a = part.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) fail(ErrorCategory::kConfig, "tune.grid: expected name=values, got '" + part + "'");
    std::string name = part.substr(a, eq - a);
    name.erase(name.find_last_not_of(" \t") + 1);
    RunSettings probe;
    probe.apply({{name, 1.0}});  // rejects names that cannot be tuned
    g.add(name, tuning::parse_values(part.substr(eq + 1)));
  }
  if (g.empty()) fail(ErrorCategory::kConfig, "tune.grid is empty");
  return g;
}

tuning::Grid standard_grid(RunMethod method) {
  switch (method) {
    case RunMethod::kBm25: return tuning::Grid::bm25();
    case RunMethod::kRm3: return tuning::Grid::rm3();
    case RunMethod::kGrm: return tuning::Grid::grm();
  }
  fail(ErrorCategory::kInternal, "unhandled method");
}

void cmd_index(const Settings& s, const Writer& out) {
  const auto& path = Settings::require(s.index_path, "index.path");
  const auto docs = load_corpus(s);
  const auto idx = index::InvertedIndex::build(docs, s.analyzer, static_cast<unsigned>(s.threads));
  FileLock lock(path);
  idx.save(path);
  out("doc_count=" + std::to_string(idx.doc_count()) + "\n");
  out("avg_doc_length=" + fmt("%.4f", idx.avg_doc_length()) + "\n");
  out("vocabulary_size=" + std::to_string(idx.vocabulary_size()) + "\n");
}

void cmd_generate(const Settings& s, const Writer& out) {
  const auto topics = generation::read_topics(Settings::require(s.topics_path, "topics.path"), s.query_variant);
  const auto& pool_path = Settings::require(s.pool_path, "generation.pool_path");
  std::unique_ptr<generation::ChatProvider> live;
  std::unique_ptr<generation::ChatProvider> provider;
  if (s.provider == ProviderKind::kReplay) {
    provider = std::make_unique<generation::ReplayProvider>(
        Settings::require(s.completions_path, "generation.completions_path"));
  } else {
    auto options = generation::HttpChatProvider::options_from_environment(s.base_url);
    options.min_interval = std::chrono::milliseconds(s.min_interval_ms);
    options.max_retries = s.max_retries;
    live = std::make_unique<generation::HttpChatProvider>(std::move(options));
    if (!s.completions_path.empty()) {
      provider = std::make_unique<generation::CachingProvider>(*live, s.completions_path);
    }
  }
  generation::ChatProvider& chat = provider ? *provider : *live;

  FileLock lock(pool_path);
  generation::PoolCache cache(pool_path);
  size_t total = 0;
  for (const auto& topic : topics) {
    const auto docs = generation::generate_pool(topic, s.generation, chat, &cache);
    total += docs.size();
    out(topic.qid + "\t" + std::to_string(docs.size()) + "\n");
  }
  out("generated documents: " + std::to_string(total) + " in " + pool_path + "\n");
}

void cmd_run(const Settings& s, const Writer& out) {
  const auto ws = open_workspace(s, false, false);
  const Pipeline pipeline(ws->data);
  const auto run = pipeline.run(s.run, s.threads);
  std::ostringstream text;
  eval::write_run(run, text);
  emit(s, text.str(), out, "run " + run.tag + " (" + std::to_string(run.queries.size()) + " queries)");
}

void cmd_eval(const Settings& s, const std::vector<std::string>& run_paths, const std::string& baseline_path,
              const Writer& out) {
  if (run_paths.empty()) fail(ErrorCategory::kInvalidArgument, "eval needs at least one run file");
  const auto qrels = eval::read_qrels(Settings::require(s.qrels_path, "qrels.path"));
  std::optional<eval::MetricReport> baseline;
  std::string table = "run\tMAP\tnDCG\tR@1000\tqueries\n";
  const auto row = [&](const eval::MetricReport& r, const std::string& name) {
    bool better[3] = {false, false, false};
    if (baseline && &r != &*baseline) {
      const eval::Measure ms[3] = {eval::Measure::kMap, eval::Measure::kNdcg, eval::Measure::kRecall1000};
      for (int i = 0; i < 3; ++i) {
        const auto t = eval::compare_reports(r, *baseline, ms[i]);
        better[i] = t.significant() && t.t > 0;
      }
    }
    table += name + "\t" + metric_cell(r.map, better[0]) + "\t" + metric_cell(r.ndcg, better[1]) + "\t" +
             metric_cell(r.recall_1000, better[2]) + "\t" + std::to_string(r.query_count()) + "\n";
  };
  if (!baseline_path.empty()) {
    const auto run = eval::read_run(baseline_path);
    warn_qid_mismatch(run, qrels, baseline_path);
    baseline = eval::evaluate(run, qrels);
    row(*baseline, (run.tag.empty() ? baseline_path : run.tag) + " (baseline)");
  }
  for (const auto& path : run_paths) {
    const auto run = eval::read_run(path);
    warn_qid_mismatch(run, qrels, path);
    row(eval::evaluate(run, qrels), run.tag.empty() ? path : run.tag);
  }
  emit(s, table, out, "evaluation table");
}

void cmd_tune(const Settings& s, const Writer& out) {
  const auto ws = open_workspace(s, false, true);
  const auto grid = s.tune_grid.empty() ? standard_grid(s.run.method) : parse_grid(s.tune_grid);
  const auto folds = tuning::read_folds(Settings::require(s.folds_path, "folds.path"));
  std::vector<std::string> qids;
  for (const auto& t : ws->data.topics) qids.push_back(t.qid);
  tuning::validate_folds(folds, &qids);

  const Pipeline pipeline(ws->data);
  const tuning::RunProducer producer = [&](const tuning::ParamPoint& point) {
    RunSettings r = s.run;
    r.apply(point);
    return pipeline.run(r, 1);
  };
  const auto result = tuning::cross_validate(producer, grid, folds, ws->qrels, s.threads);

  std::string report = "fold\tchosen\ttrain_R@1000\tMAP\tnDCG\tR@1000\n";
  for (const auto& f : result.folds) {
    report += f.fold_id + "\t" + tuning::to_string(f.chosen) + "\t" + fmt("%.4f", f.train_recall) + "\t" +
              fmt("%.4f", f.test.map) + "\t" + fmt("%.4f", f.test.ndcg) + "\t" + fmt("%.4f", f.test.recall_1000) + "\n";
  }
  const auto& a = result.aggregate;
  report += "all\t-\t-\t" + fmt("%.4f", a.map) + "\t" + fmt("%.4f", a.ndcg) + "\t" + fmt("%.4f", a.recall_1000) + "\n";
  report += "grid points: " + std::to_string(grid.size()) + ", failed: " + std::to_string(result.failed_points.size()) + "\n";
  out(report);
  if (!s.output_path.empty()) {
    std::ostringstream text;
    eval::write_run(result.combined, text);
    emit(s, text.str(), out, "held-out run " + result.combined.tag);
  }
}

void cmd_variance(const Settings& s, const Writer& out) {
  const auto ws = open_workspace(s, true, true);
  eval::VarianceParams params;
  params.bm25 = s.run.bm25;
  params.fb_terms = s.run.rm.fb_terms;
  params.original_query_weight = s.run.rm.original_query_weight;
  params.depth = s.run.depth;
  std::vector<eval::VarianceRow> rows;
  size_t failures = 0;
  for (const auto& topic : ws->data.topics) {
    auto it = ws->data.pools.find(topic.qid);
    if (it == ws->data.pools.end()) {
      log_warning("variance: no generated documents for qid " + topic.qid);
      continue;
    }
    auto table = eval::variance_analysis(topic, it->second, ws->index, params, ws->qrels);
    failures += table.failures.size();
    rows.insert(rows.end(), table.rows.begin(), table.rows.end());
  }
  if (failures > 0) log_warning("variance: " + std::to_string(failures) + " generated documents failed");
  std::ostringstream csv;
  eval::write_variance_csv(rows, csv);
  emit(s, csv.str(), out, "variance table (" + std::to_string(rows.size()) + " rows)");
}

void cmd_pairs(const Settings& s, const Writer& out) {
  const auto idx = load_index(s);
  const auto topics = generation::read_topics(Settings::require(s.topics_path, "topics.path"), s.query_variant);
  const auto pools = load_pools(s);
  std::unordered_map<std::string, std::string> texts;
  for (auto& d : load_corpus(s)) texts.emplace(d.docid, d.full_text());

  std::string tsv;
  for (const auto& topic : topics) {
    auto it = pools.find(topic.qid);
    if (it == pools.end()) continue;
    std::set<std::string> seen;
    for (const auto& doc : it->second) {
      for (const auto& n : rase::retrieve_neighbors(doc, idx, s.run.bm25, s.run.k_rase).neighbors) {
        if (!seen.insert(n.docid).second) continue;
        auto t = texts.find(n.docid);
        if (t == texts.end()) fail(ErrorCategory::kNotFound, "docid " + n.docid + " is in the index but not the corpus");
        tsv += escape_field(topic.qid) + "\t" + escape_field(n.docid) + "\t" + escape_field(topic.text) + "\t" +
               escape_field(t->second) + "\n";
      }
    }
  }
  emit(s, tsv, out, "scoring pairs");
}

}  // namespace grm::app
