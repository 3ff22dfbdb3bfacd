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

// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grm/c_api.h"

namespace {

void write_stdout(void*, const char* data, size_t len) { std::fwrite(data, 1, len, stdout); }

void log_stderr(void* user, grm_log_level level, const char* message) {
  const bool verbose = *static_cast<bool*>(user);
  if (level == GRM_LOG_WARNING) std::fprintf(stderr, "warning: %s\n", message);
  else if (verbose) std::fprintf(stderr, "info: %s\n", message);
}

int report(grm_status status) {
  if (status == GRM_OK) return 0;
  std::string msg = grm_last_error();
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::fflush(stdout);
  std::fprintf(stderr, "error: %s: %s\n", grm_status_name(status), msg.c_str());
  return static_cast<int>(status);
}

struct ConfigHandle {
  grm_config* ptr = nullptr;
  ~ConfigHandle() { grm_config_destroy(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document retrieval with generated-document query expansion"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, output, method, grid, baseline;
  std::vector<std::string> overrides, runs;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--output", output, "output file (output.path)");
  app.add_option("--threads", threads, "worker threads (threads)")->check(CLI::Range(1, 256));
  app.add_option("--set", overrides, "override a config key, key=value (repeatable)");
  app.add_flag("-v,--verbose", verbose, "print info messages");

  auto* index = app.add_subcommand("index", "build the index from the corpus");
  auto* generate = app.add_subcommand("generate", "generate the document pool (resumable)");
  auto* run = app.add_subcommand("run", "write a TREC run");
  run->add_option("--method", method, "bm25 | rm3 | grm (run.method)");
  auto* eval = app.add_subcommand("eval", "evaluate run files");
  eval->add_option("runs", runs, "run files")->required();
  eval->add_option("--baseline", baseline, "baseline run for significance marks");
  auto* tune = app.add_subcommand("tune", "cross-validated grid search");
  tune->add_option("--method", method, "bm25 | rm3 | grm (run.method)");
  tune->add_option("--grid", grid, "name=values;... (tune.grid)");
  auto* variance = app.add_subcommand("variance", "per generated document effectiveness CSV");
  auto* pairs = app.add_subcommand("pairs", "query/document pairs for an external scorer");

  CLI11_PARSE(app, argc, argv);

  grm_set_log_callback(log_stderr, &verbose);
  ConfigHandle cfg;
  if (int rc = report(grm_config_create(&cfg.ptr))) return rc;
  if (!config_path.empty()) {
    if (int rc = report(grm_config_load_file(cfg.ptr, config_path.c_str()))) return rc;
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: invalid_argument: --set expects key=value, got '%s'\n", kv.c_str());
      return GRM_E_INVALID_ARGUMENT;
    }
    if (int rc = report(grm_config_set(cfg.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()))) return rc;
  }
  const auto set = [&](const char* key, const std::string& value) {
    return value.empty() ? GRM_OK : grm_config_set(cfg.ptr, key, value.c_str());
  };
  if (int rc = report(set("output.path", output))) return rc;
  if (int rc = report(set("threads", threads > 0 ? std::to_string(threads) : ""))) return rc;
  if (int rc = report(set("run.method", method))) return rc;
  if (int rc = report(set("tune.grid", grid))) return rc;

  grm_status status = GRM_OK;
  if (*index) status = grm_cmd_index(cfg.ptr, write_stdout, nullptr);
  else if (*generate) status = grm_cmd_generate(cfg.ptr, write_stdout, nullptr);
  else if (*run) status = grm_cmd_run(cfg.ptr, write_stdout, nullptr);
  else if (*eval) {
    std::vector<const char*> paths;
    for (const auto& r : runs) paths.push_back(r.c_str());
    status = grm_cmd_eval(cfg.ptr, paths.data(), paths.size(), baseline.empty() ? nullptr : baseline.c_str(),
                          write_stdout, nullptr);
  } else if (*tune) status = grm_cmd_tune(cfg.ptr, write_stdout, nullptr);
  else if (*variance) status = grm_cmd_variance(cfg.ptr, write_stdout, nullptr);
  else if (*pairs) status = grm_cmd_pairs(cfg.ptr, write_stdout, nullptr);
  std::fflush(stdout);
  return report(status);
}
