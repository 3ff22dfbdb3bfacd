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

#ifndef GRM_APP_PIPELINE_HPP_
#define GRM_APP_PIPELINE_HPP_

#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "grm/eval/trec.hpp"
#include "grm/expansion/expansion.hpp"
#include "grm/generation/types.hpp"
#include "grm/index/inverted_index.hpp"
#include "grm/rase/rase.hpp"
#include "grm/tuning/tuning.hpp"

namespace grm::app {

enum class RunMethod { kBm25, kRm3, kGrm };

// Throws kInvalidArgument for an unknown method.
RunMethod parse_run_method(std::string_view name);
std::string_view run_method_name(RunMethod m);

struct RunSettings {
  RunMethod method = RunMethod::kBm25;
  index::Bm25Params bm25;
  expansion::RmParams rm;
  expansion::QlParams ql;
  int k_rase = 10;
  rase::EstimatorKind estimator = rase::EstimatorKind::kUniform;
  size_t depth = 1000;

  void validate() const;
  // The parameters the method actually uses, as "name=value;..." text.
  std::string canonical_params() const;
  // Method name plus 8 hex digits of a hash of canonical_params().
  std::string tag() const;
  // Overrides fields named like config keys (bm25.k1, rm.fb_docs, ...).
  void apply(const tuning::ParamPoint& point);
};

// Inputs shared by every run: the index, topics, and (for grm) generated
// pools plus estimator sources.
struct PipelineData {
  const index::InvertedIndex* index = nullptr;
  std::vector<generation::Topic> topics;
  std::map<std::string, std::vector<generation::GeneratedDocument>> pools;
  rase::EstimatorSources sources;
};

class Pipeline {
 public:
  explicit Pipeline(const PipelineData& data);

  // Ranking for one topic. Errors carry the qid.
  eval::QueryRanking run_topic(const generation::Topic& topic, const RunSettings& settings) const;
  // Rankings for every topic in topic order; `threads` topics at a time.
  eval::Run run(const RunSettings& settings, int threads = 1) const;

  // Weights for a topic's pool; cached per (qid, bm25, k_rase, estimator).
  rase::RaseResult weights(const generation::Topic& topic, const RunSettings& settings) const;
  const std::vector<generation::GeneratedDocument>& pool(const std::string& qid) const;

 private:
  const PipelineData& data_;
  mutable std::mutex mu_;
  mutable std::map<std::string, rase::RaseResult> weight_cache_;
};

}  // namespace grm::app

#endif  // GRM_APP_PIPELINE_HPP_
