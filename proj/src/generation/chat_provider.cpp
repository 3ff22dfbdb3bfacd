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

#include "grm/generation/chat_provider.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "grm/error.hpp"
#include "grm/log.hpp"
#include "grm/text/analyzer.hpp"

namespace grm::generation {

using nlohmann::json;

namespace {

json params_json(const SamplingParams& p) {
  return json{{"temperature", p.temperature},
              {"top_p", p.top_p},
              {"frequency_penalty", p.frequency_penalty},
              {"presence_penalty", p.presence_penalty},
              {"max_tokens", p.max_tokens}};
}

json messages_json(const std::vector<ChatMessage>& messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back(json{{"role", m.role}, {"content", m.content}});
  return arr;
}

ChatRequest request_from_record(const json& rec) {
  ChatRequest r;
  r.model = rec.at("model").get<std::string>();
  for (const auto& m : rec.at("messages")) {
    r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  const auto& p = rec.at("params");
  r.params.temperature = p.at("temperature").get<double>();
  r.params.top_p = p.at("top_p").get<double>();
  r.params.frequency_penalty = p.at("frequency_penalty").get<double>();
  r.params.presence_penalty = p.at("presence_penalty").get<double>();
  r.params.max_tokens = p.at("max_tokens").get<int>();
  r.round = rec.at("round").get<int>();
  return r;
}

// Loads key -> completion from a cache file; missing file gives an empty map
// when `must_exist` is false.
std::unordered_map<std::string, std::string> load_store(const std::string& path, bool must_exist) {
  std::unordered_map<std::string, std::string> out;
  std::ifstream in(path);
  if (!in) {
    if (must_exist) fail(ErrorCategory::kIo, "cannot open completions file: " + path);
    return out;
  }
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      const ChatRequest request = request_from_record(rec);
      const std::string key = request.key();
      if (rec.contains("key") && rec.at("key").get<std::string>() != key) {
        fail(ErrorCategory::kFormat, where + ": stored key does not match request contents");
      }
      out[key] = rec.at("completion").get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorCategory::kFormat, where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string ChatRequest::canonical_json() const {
  const json j{{"model", model},
               {"messages", messages_json(messages)},
               {"params", params_json(params)},
               {"round", round}};
  return j.dump();
}

std::string ChatRequest::key() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(text::fnv1a64(canonical_json())));
  return buf;
}

std::string ChatRequest::rendered() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += m.role + ": " + m.content;
  }
  return out;
}

// ---------------------------------------------------------------------------

CompletionStore::CompletionStore(const std::string& path) : completions_(load_store(path, true)) {}

const std::string* CompletionStore::find(const std::string& key) const {
  auto it = completions_.find(key);
  return it == completions_.end() ? nullptr : &it->second;
}

std::string CompletionStore::record_line(const ChatRequest& request, const std::string& completion) {
  const json rec{{"key", request.key()},
                 {"model", request.model},
                 {"messages", messages_json(request.messages)},
                 {"params", params_json(request.params)},
                 {"round", request.round},
                 {"completion", completion}};
  return rec.dump();
}

ReplayProvider::ReplayProvider(const std::string& path) : store_(path) {}

std::string ReplayProvider::complete(const ChatRequest& request) {
  const auto key = request.key();
  if (const auto* hit = store_.find(key)) return *hit;
  fail(ErrorCategory::kGeneration,
       "no recorded completion for request key " + key + " (round " + std::to_string(request.round) +
           ", model " + request.model + ")");
}

CachingProvider::CachingProvider(ChatProvider& inner, const std::string& path)
    : inner_(inner), path_(path), completions_(load_store(path, false)) {
  out_.open(path, std::ios::app);
  if (!out_) fail(ErrorCategory::kIo, "cannot append to completions file: " + path);
}

std::string CachingProvider::complete(const ChatRequest& request) {
  const auto key = request.key();
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = completions_.find(key); it != completions_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::string completion = inner_.complete(request);
  std::lock_guard<std::mutex> lock(mu_);
  ++misses_;
  auto [it, inserted] = completions_.emplace(key, completion);
  if (inserted) {
    out_ << CompletionStore::record_line(request, completion) << '\n';
    out_.flush();
    if (!out_) fail(ErrorCategory::kIo, "failed writing completions file: " + path_);
  }
  return it->second;
}

// ---------------------------------------------------------------------------

HttpChatProvider::HttpChatProvider(Options options) : options_(std::move(options)) {
  const auto& url = options_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCategory::kConfig, "generation.base_url must start with http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) {
    fail(ErrorCategory::kConfig, "this build has no TLS support; use an http:// base_url");
  }
#endif
}

HttpChatProvider::Options HttpChatProvider::options_from_environment(std::string base_url) {
  Options options;
  options.base_url = std::move(base_url);
  const char* key = std::getenv("GRM_API_KEY");
  if (key == nullptr || *key == '\0') {
    fail(ErrorCategory::kConfig, "GRM_API_KEY is not set (required by the live provider)");
  }
  options.api_key = key;
  return options;
}

void HttpChatProvider::wait_for_slot() {
  std::unique_lock<std::mutex> lock(mu_);
  const auto now = std::chrono::steady_clock::now();
  const auto ready = last_request_ + options_.min_interval;
  if (last_request_.time_since_epoch().count() != 0 && now < ready) {
    std::this_thread::sleep_for(ready - now);
  }
  last_request_ = std::chrono::steady_clock::now();
  ++attempts_;
}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  json body = params_json(request.params);
  body["model"] = request.model;
  body["messages"] = messages_json(request.messages);
  const std::string payload = body.dump();
  const httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};
  const std::string path = path_prefix_ + "/chat/completions";

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    wait_for_slot();
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(path, headers, payload, "application/json");

    std::chrono::milliseconds retry_after{0};
    if (res && res->status == 200) {
      try {
        const json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        fail(ErrorCategory::kGeneration, std::string("malformed chat completion response: ") + e.what());
      }
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      const bool transient = res->status == 408 || res->status == 429 || res->status >= 500;
      if (!transient) fail(ErrorCategory::kGeneration, "chat completion failed: " + last_error);
      if (res->has_header("Retry-After")) {
        retry_after = std::chrono::milliseconds(
            static_cast<long>(1000.0 * std::atof(res->get_header_value("Retry-After").c_str())));
      }
    }
    if (attempt == options_.max_retries) break;
    std::chrono::milliseconds delay = options_.initial_backoff * (1L << std::min(attempt, 20));
    delay = std::max(delay, retry_after);
    delay = std::min(delay, options_.max_backoff);
    log_warning("chat completion attempt " + std::to_string(attempt + 1) + " failed (" + last_error +
                "); retrying");
    std::this_thread::sleep_for(delay);
  }
  fail(ErrorCategory::kGeneration, "chat completion failed after " +
                                       std::to_string(options_.max_retries + 1) +
                                       " attempts: " + last_error);
}

}  // namespace grm::generation
