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

#include "grm/app/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <future>

#include "grm/error.hpp"
#include "grm/text/analyzer.hpp"

namespace grm::app {

using generation::Topic;

RunMethod parse_run_method(std::string_view name) {
  if (name == "bm25") return RunMethod::kBm25;
  if (name == "rm3") return RunMethod::kRm3;
  if (name == "grm") return RunMethod::kGrm;
  fail(ErrorCategory::kInvalidArgument, "unknown method '" + std::string(name) + "' (expected bm25|rm3|grm)");
}

std::string_view run_method_name(RunMethod m) {
  switch (m) {
    case RunMethod::kBm25: return "bm25";
    case RunMethod::kRm3: return "rm3";
    case RunMethod::kGrm: return "grm";
  }
  return "?";
}

void RunSettings::validate() const {
  bm25.validate();
  if (depth < 1) fail(ErrorCategory::kConfig, "run.depth must be >= 1");
  if (method != RunMethod::kBm25) rm.validate();
  if (method == RunMethod::kRm3) ql.validate();
  if (method == RunMethod::kGrm) rase::validate_k_rase(k_rase);
}

std::string RunSettings::canonical_params() const {
  char buf[512];
  int n = std::snprintf(buf, sizeof(buf), "k1=%.17g;b=%.17g;depth=%zu", bm25.k1, bm25.b, depth);
  std::string out(buf, static_cast<size_t>(n));
  if (method != RunMethod::kBm25) {
    n = std::snprintf(buf, sizeof(buf), ";fb_docs=%d;fb_terms=%d;lambda=%.17g", rm.fb_docs, rm.fb_terms,
                      rm.original_query_weight);
    out.append(buf, static_cast<size_t>(n));
  }
  if (method == RunMethod::kRm3) {
    n = std::snprintf(buf, sizeof(buf), ";mu=%.17g", ql.mu);
    out.append(buf, static_cast<size_t>(n));
  }
  if (method == RunMethod::kGrm) {
    out += ";k_rase=" + std::to_string(k_rase) + ";estimator=" + std::string(rase::estimator_name(estimator));
  }
  return out;
}

std::string RunSettings::tag() const {
  char hash[9];
  std::snprintf(hash, sizeof(hash), "%08x", static_cast<unsigned>(text::fnv1a64(canonical_params()) & 0xffffffffu));
  return std::string(run_method_name(method)) + "-" + hash;
}

void RunSettings::apply(const tuning::ParamPoint& point) {
  for (const auto& [name, v] : point) {
    if (name == "bm25.k1") bm25.k1 = v;
    else if (name == "bm25.b") bm25.b = v;
    else if (name == "rm.fb_docs") rm.fb_docs = static_cast<int>(std::lround(v));
    else if (name == "rm.fb_terms") rm.fb_terms = static_cast<int>(std::lround(v));
    else if (name == "rm.original_query_weight") rm.original_query_weight = v;
    else if (name == "ql.mu") ql.mu = v;
    else if (name == "rase.k_rase") k_rase = static_cast<int>(std::lround(v));
    else fail(ErrorCategory::kConfig, "parameter '" + name + "' cannot be tuned");
  }
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(const PipelineData& data) : data_(data) {
  if (data_.index == nullptr) fail(ErrorCategory::kInternal, "pipeline needs an index");
}

const std::vector<generation::GeneratedDocument>& Pipeline::pool(const std::string& qid) const {
  auto it = data_.pools.find(qid);
  if (it == data_.pools.end() || it->second.empty()) {
    fail(ErrorCategory::kPipeline, "no generated documents for qid " + qid + " (run 'generate' first)");
  }
  return it->second;
}

rase::RaseResult Pipeline::weights(const Topic& topic, const RunSettings& settings) const {
  char key[256];
  std::snprintf(key, sizeof(key), "%s|%.17g|%.17g|%d|%d", topic.qid.c_str(), settings.bm25.k1, settings.bm25.b,
                settings.k_rase, static_cast<int>(settings.estimator));
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = weight_cache_.find(key); it != weight_cache_.end()) return it->second;
  }
  rase::EstimatorSources sources = data_.sources;
  sources.index = data_.index;
  sources.bm25 = settings.bm25;
  rase::RaseConfig config{settings.bm25, settings.k_rase, settings.estimator};
  auto result = rase::rase_weights(pool(topic.qid), topic, *data_.index, config, sources);
  std::lock_guard<std::mutex> lock(mu_);
  return weight_cache_.emplace(key, std::move(result)).first->second;
}

eval::QueryRanking Pipeline::run_topic(const Topic& topic, const RunSettings& settings) const {
  const auto& index = *data_.index;
  try {
    switch (settings.method) {
      case RunMethod::kBm25:
        return {topic.qid, index::bm25_search(index.analyzer().analyze(topic.text), index, settings.bm25, settings.depth)};
      case RunMethod::kRm3: {
        const auto q = expansion::rm3_expand(topic, index, settings.bm25, settings.rm, settings.ql);
        return {topic.qid, expansion::execute_expanded(q, index, settings.bm25, settings.depth)};
      }
      case RunMethod::kGrm: {
        const auto w = weights(topic, settings);
        const auto q = expansion::grm_expand(topic, pool(topic.qid), w.weights, settings.rm, index);
        return {topic.qid, expansion::execute_expanded(q, index, settings.bm25, settings.depth)};
      }
    }
  } catch (const Error& e) {
    if (std::string(e.what()).find(topic.qid) != std::string::npos) throw;
    fail(e.category(), "qid " + topic.qid + ": " + e.what());
  }
  fail(ErrorCategory::kInternal, "unhandled run method");
}

eval::Run Pipeline::run(const RunSettings& settings, int threads) const {
  settings.validate();
  eval::Run out;
  out.tag = settings.tag();
  out.queries.resize(data_.topics.size());
  const size_t batch = static_cast<size_t>(std::max(threads, 1));
  for (size_t start = 0; start < data_.topics.size(); start += batch) {
    const size_t end = std::min(data_.topics.size(), start + batch);
    if (batch == 1) {
      out.queries[start] = run_topic(data_.topics[start], settings);
      continue;
    }
    std::vector<std::future<eval::QueryRanking>> futures;
    for (size_t i = start; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, [this, &settings, i] { return run_topic(data_.topics[i], settings); }));
    }
    for (size_t i = start; i < end; ++i) out.queries[i] = futures[i - start].get();
  }
  return out;
}

}  // namespace grm::app
