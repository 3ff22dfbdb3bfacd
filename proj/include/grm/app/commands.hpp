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

#ifndef GRM_APP_COMMANDS_HPP_
#define GRM_APP_COMMANDS_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "grm/app/config.hpp"
#include "grm/tuning/tuning.hpp"

namespace grm::app {

// Receives report text (and command output when output.path is empty).
using Writer = std::function<void(std::string_view)>;

// Builds the index from corpus.path and saves it to index.path.
void cmd_index(const Settings& s, const Writer& out);
// Fills generation.pool_path for every topic, resuming a partial pool.
void cmd_generate(const Settings& s, const Writer& out);
// TREC run for run.method over all topics.
void cmd_run(const Settings& s, const Writer& out);
// Metric table for each run; with a baseline, '+' marks a significant
// improvement (paired t-test, p < 0.05).
void cmd_eval(const Settings& s, const std::vector<std::string>& run_paths,
              const std::string& baseline_path, const Writer& out);
// Cross-validated grid search for run.method. Prints the per-fold report and
// writes the held-out run to output.path.
void cmd_tune(const Settings& s, const Writer& out);
// Single-document expansion table as CSV.
void cmd_variance(const Settings& s, const Writer& out);
// (query, neighbor document) pairs for an external scorer:
// qid<TAB>docid<TAB>query<TAB>document with '\', tab and newline escaped.
void cmd_pairs(const Settings& s, const Writer& out);

// "name=values;name=values" into a grid, values as in tuning::parse_values.
tuning::Grid parse_grid(std::string_view spec);
tuning::Grid standard_grid(RunMethod method);

std::string escape_field(std::string_view text);

}  // namespace grm::app

#endif  // GRM_APP_COMMANDS_HPP_
