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

#include "grm/c_api.h"

#include <cstring>
#include <new>
#include <string>

#include "grm/app/commands.hpp"
#include "grm/app/config.hpp"
#include "grm/error.hpp"
#include "grm/log.hpp"

struct grm_config {
  grm::app::Config config;
};

namespace {

thread_local std::string g_last_error;

grm_status to_status(grm::ErrorCategory c) {
  switch (c) {
    case grm::ErrorCategory::kInvalidArgument: return GRM_E_INVALID_ARGUMENT;
    case grm::ErrorCategory::kConfig: return GRM_E_CONFIG;
    case grm::ErrorCategory::kIo: return GRM_E_IO;
    case grm::ErrorCategory::kFormat: return GRM_E_FORMAT;
    case grm::ErrorCategory::kNotFound: return GRM_E_NOT_FOUND;
    case grm::ErrorCategory::kGeneration: return GRM_E_GENERATION;
    case grm::ErrorCategory::kPipeline: return GRM_E_PIPELINE;
    case grm::ErrorCategory::kInternal: return GRM_E_INTERNAL;
  }
  return GRM_E_INTERNAL;
}

template <typename Fn>
grm_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return GRM_OK;
  } catch (const grm::Error& e) {
    g_last_error = e.what();
    return to_status(e.category());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return GRM_E_INTERNAL;
}

grm_status null_argument(const char* name) {
  g_last_error = std::string(name) + " must not be NULL";
  return GRM_E_INVALID_ARGUMENT;
}

grm::app::Writer writer(grm_write_fn fn, void* user) {
  return [fn, user](std::string_view s) {
    if (fn != nullptr) fn(user, s.data(), s.size());
  };
}

template <typename Fn>
grm_status command(const grm_config* config, Fn&& fn) {
  if (config == nullptr) return null_argument("config");
  return guarded([&] { fn(grm::app::resolve(config->config)); });
}

}  // namespace

extern "C" {

const char* grm_version(void) { return "0.1.0"; }

const char* grm_status_name(grm_status status) {
  switch (status) {
    case GRM_OK: return "ok";
    case GRM_E_INVALID_ARGUMENT: return "invalid_argument";
    case GRM_E_CONFIG: return "config";
    case GRM_E_IO: return "io";
    case GRM_E_FORMAT: return "format";
    case GRM_E_NOT_FOUND: return "not_found";
    case GRM_E_GENERATION: return "generation";
    case GRM_E_PIPELINE: return "pipeline";
    case GRM_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* grm_last_error(void) { return g_last_error.c_str(); }

void grm_set_log_callback(grm_log_fn fn, void* user) {
  if (fn == nullptr) {
    grm::set_log_sink(nullptr);
    return;
  }
  grm::set_log_sink([fn, user](grm::LogLevel level, const std::string& msg) {
    fn(user, level == grm::LogLevel::kWarning ? GRM_LOG_WARNING : GRM_LOG_INFO, msg.c_str());
  });
}

grm_status grm_config_create(grm_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new grm_config(); });
}

void grm_config_destroy(grm_config* config) { delete config; }

grm_status grm_config_load_file(grm_config* config, const char* path) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    const auto loaded = grm::app::Config::load(path);
    for (const auto& [k, v] : loaded.values()) config->config.set(k, v);
  });
}

grm_status grm_config_set(grm_config* config, const char* key, const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  if (value == nullptr) return null_argument("value");
  return guarded([&] { config->config.set(key, value); });
}

grm_status grm_config_get(const grm_config* config, const char* key, char* buf, size_t buf_len, size_t* needed) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  return guarded([&] {
    const std::string v = config->config.get(key);
    if (needed != nullptr) *needed = v.size() + 1;
    if (buf == nullptr || buf_len == 0) return;
    if (buf_len < v.size() + 1) grm::fail(grm::ErrorCategory::kInvalidArgument, "buffer too small for " + std::string(key));
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

grm_status grm_config_validate(const grm_config* config) {
  return command(config, [](const grm::app::Settings&) {});
}

grm_status grm_cmd_index(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_index(s, writer(out, user)); });
}

grm_status grm_cmd_generate(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_generate(s, writer(out, user)); });
}

grm_status grm_cmd_run(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_run(s, writer(out, user)); });
}

grm_status grm_cmd_eval(const grm_config* config, const char* const* run_paths, size_t n_runs,
                        const char* baseline_path, grm_write_fn out, void* user) {
  if (run_paths == nullptr && n_runs > 0) return null_argument("run_paths");
  return command(config, [&](const grm::app::Settings& s) {
    std::vector<std::string> paths;
    for (size_t i = 0; i < n_runs; ++i) {
      if (run_paths[i] == nullptr) grm::fail(grm::ErrorCategory::kInvalidArgument, "run path is NULL");
      paths.emplace_back(run_paths[i]);
    }
    grm::app::cmd_eval(s, paths, baseline_path ? baseline_path : "", writer(out, user));
  });
}

grm_status grm_cmd_tune(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_tune(s, writer(out, user)); });
}

grm_status grm_cmd_variance(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_variance(s, writer(out, user)); });
}

grm_status grm_cmd_pairs(const grm_config* config, grm_write_fn out, void* user) {
  return command(config, [&](const grm::app::Settings& s) { grm::app::cmd_pairs(s, writer(out, user)); });
}

}  // extern "C"
