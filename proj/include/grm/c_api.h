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

#ifndef GRM_C_API_H_
#define GRM_C_API_H_

#include <stddef.h>

#if defined(_WIN32)
#define GRM_API __declspec(dllexport)
#else
#define GRM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every failing call also sets a thread-local message that
 * grm_last_error() returns until the next call on the same thread. */
typedef enum grm_status {
  GRM_OK = 0,
  GRM_E_INVALID_ARGUMENT = 1,
  GRM_E_CONFIG = 2,
  GRM_E_IO = 3,
  GRM_E_FORMAT = 4,
  GRM_E_NOT_FOUND = 5,
  GRM_E_GENERATION = 6,
  GRM_E_PIPELINE = 7,
  GRM_E_INTERNAL = 8
} grm_status;

typedef enum grm_log_level { GRM_LOG_INFO = 0, GRM_LOG_WARNING = 1 } grm_log_level;

typedef struct grm_config grm_config;

/* Receives command output. `data` is not NUL-terminated. */
typedef void (*grm_write_fn)(void* user, const char* data, size_t len);
typedef void (*grm_log_fn)(void* user, grm_log_level level, const char* message);

GRM_API const char* grm_version(void);
/* Lowercase category word, e.g. "config". */
GRM_API const char* grm_status_name(grm_status status);
GRM_API const char* grm_last_error(void);

/* Process-wide. NULL restores the default (warnings to stderr). */
GRM_API void grm_set_log_callback(grm_log_fn fn, void* user);

GRM_API grm_status grm_config_create(grm_config** out);
GRM_API void grm_config_destroy(grm_config* config);
/* Applies every key in the file on top of the current values. */
GRM_API grm_status grm_config_load_file(grm_config* config, const char* path);
GRM_API grm_status grm_config_set(grm_config* config, const char* key, const char* value);
/* Copies the effective value (NUL-terminated) into `buf` when it fits;
 * `needed` (optional) receives the length including the terminator. */
GRM_API grm_status grm_config_get(const grm_config* config, const char* key, char* buf, size_t buf_len,
                                  size_t* needed);
/* Checks every key without running anything. */
GRM_API grm_status grm_config_validate(const grm_config* config);

/* Commands. `out` may be NULL to discard output. */
GRM_API grm_status grm_cmd_index(const grm_config* config, grm_write_fn out, void* user);
GRM_API grm_status grm_cmd_generate(const grm_config* config, grm_write_fn out, void* user);
GRM_API grm_status grm_cmd_run(const grm_config* config, grm_write_fn out, void* user);
/* `baseline_path` may be NULL. */
GRM_API grm_status grm_cmd_eval(const grm_config* config, const char* const* run_paths, size_t n_runs,
                                const char* baseline_path, grm_write_fn out, void* user);
GRM_API grm_status grm_cmd_tune(const grm_config* config, grm_write_fn out, void* user);
GRM_API grm_status grm_cmd_variance(const grm_config* config, grm_write_fn out, void* user);
GRM_API grm_status grm_cmd_pairs(const grm_config* config, grm_write_fn out, void* user);

#ifdef __cplusplus
}
#endif

#endif /* GRM_C_API_H_ */
