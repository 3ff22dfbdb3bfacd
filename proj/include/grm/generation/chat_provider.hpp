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

#ifndef GRM_GENERATION_CHAT_PROVIDER_HPP_
#define GRM_GENERATION_CHAT_PROVIDER_HPP_

#include <chrono>
#include <fstream>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace grm::generation {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_tokens = 512;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  SamplingParams params;
  // Part of the cache key so that identical prompts issued in different
  // rounds are distinct samples.
  int round = 0;

  // Canonical JSON text of every field (sorted keys).
  std::string canonical_json() const;
  // 16 hex digits of FNV-1a over canonical_json().
  std::string key() const;
  // Messages rendered as "role: content" blocks, for human inspection.
  std::string rendered() const;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // Returns the completion text or throws grm::Error (kGeneration).
  virtual std::string complete(const ChatRequest& request) = 0;
};

// A completions cache file: JSONL with one record per line,
//   {"key", "model", "messages", "params", "round", "completion"}.
// The key is recomputed from the request fields on load, so a record whose
// stored key disagrees with its contents is rejected.
class CompletionStore {
 public:
  CompletionStore() = default;
  explicit CompletionStore(const std::string& path);

  const std::string* find(const std::string& key) const;
  size_t size() const { return completions_.size(); }

  static std::string record_line(const ChatRequest& request, const std::string& completion);

 private:
  std::unordered_map<std::string, std::string> completions_;
};

// Serves completions from a store; a miss is an error. Safe for concurrent
// use (read-only after construction).
class ReplayProvider : public ChatProvider {
 public:
  explicit ReplayProvider(const std::string& path);
  explicit ReplayProvider(CompletionStore store) : store_(std::move(store)) {}

  std::string complete(const ChatRequest& request) override;

 private:
  CompletionStore store_;
};

// Answers from the cache file when possible; otherwise asks `inner` and
// appends the new record (flushed immediately) so that interrupted runs can
// resume and later runs can replay.
class CachingProvider : public ChatProvider {
 public:
  CachingProvider(ChatProvider& inner, const std::string& path);

  std::string complete(const ChatRequest& request) override;

  size_t cache_hits() const { return hits_; }
  size_t cache_misses() const { return misses_; }

 private:
  ChatProvider& inner_;
  std::string path_;
  std::mutex mu_;
  std::unordered_map<std::string, std::string> completions_;
  std::ofstream out_;
  size_t hits_ = 0;
  size_t misses_ = 0;
};

// OpenAI-compatible POST {base_url}/chat/completions.
class HttpChatProvider : public ChatProvider {
 public:
  struct Options {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::chrono::milliseconds min_interval{200};
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::milliseconds max_backoff{30000};
    int max_retries = 5;
    std::chrono::seconds timeout{120};
  };

  explicit HttpChatProvider(Options options);

  // Reads the credential from GRM_API_KEY; throws kConfig if unset.
  static Options options_from_environment(std::string base_url);

  std::string complete(const ChatRequest& request) override;

  size_t attempts() const { return attempts_; }

 private:
  void wait_for_slot();

  Options options_;
  std::string scheme_host_;
  std::string path_prefix_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point last_request_{};
  size_t attempts_ = 0;
};

}  // namespace grm::generation

#endif  // GRM_GENERATION_CHAT_PROVIDER_HPP_
