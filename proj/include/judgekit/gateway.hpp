// Copyright 2026 The judgekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Clients for chat-completion endpoints and scalar scorer endpoints.
//
// Wire formats
//   POST {base_url}/chat/completions
//     {"model", "messages": [{"role": "user", "content"}], "temperature",
//      "top_p", "max_tokens"}  ->  choices[0].message.content
//   POST {base_url}/score
//     {"query", "response"}  ->  {"score": <number>}
//
// 429, 5xx and transport failures are retried with exponential backoff
// (capped at 60 s); other 4xx responses fail immediately. At most
// max_in_flight requests per client are on the wire at once.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "judgekit/completion_source.hpp"
#include "judgekit/errors.hpp"

namespace judgekit {

enum class EndpointRole { chat, scorer };

struct EndpointConfig {
  std::string name;
  std::string base_url;
  std::string model_id;
  // Name of the environment variable holding the API key; empty = no auth.
  std::string api_key_env;
  double timeout_s = 120.0;
  int max_retries = 3;
  int max_in_flight = 8;
  EndpointRole role = EndpointRole::chat;
  int backoff_initial_ms = 500;
  // Largest max_tokens the endpoint accepts; 0 = not declared.
  int max_tokens_limit = 0;

  void validate() const {
    if (name.empty()) throw ConfigError("endpoint without a name");
    if (base_url.empty()) throw ConfigError("endpoint '" + name + "': base_url is empty");
    if (max_in_flight < 1) throw ConfigError("endpoint '" + name + "': max_in_flight must be >= 1");
    if (max_retries < 0) throw ConfigError("endpoint '" + name + "': max_retries must be >= 0");
    if (!(timeout_s > 0.0)) throw ConfigError("endpoint '" + name + "': timeout must be > 0");
    if (backoff_initial_ms < 0) throw ConfigError("endpoint '" + name + "': negative backoff");
  }
};

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 8192;

  void validate() const {
    if (!(temperature >= 0.0)) throw ConfigError("sampling.temperature must be >= 0");
    if (!(top_p >= 0.0 && top_p <= 1.0)) throw ConfigError("sampling.top_p must be in [0, 1]");
    if (max_tokens < 1) throw ConfigError("sampling.max_tokens must be >= 1");
  }
};

inline constexpr std::chrono::milliseconds kMaxBackoff{60'000};

// Delay before retry number `retry` (1-based).
inline std::chrono::milliseconds backoff_delay(const EndpointConfig& ep, int retry) {
  double ms = static_cast<double>(ep.backoff_initial_ms) * std::pow(2.0, retry - 1);
  ms = std::min(ms, static_cast<double>(kMaxBackoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

struct HttpRequest {
  std::string base_url;
  std::string path;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  double timeout_s = 120.0;
};

struct HttpResponse {
  // 0 when no HTTP response arrived (refused, timed out).
  int status = 0;
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& req) = 0;
};

// "http://host:port/v1" -> {"http://host:port", "/v1"}
inline std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

class HttplibTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& req) override {
    auto [origin, prefix] = split_base_url(req.base_url);
    httplib::Client cli(origin);
    const auto secs = std::chrono::duration<double>(req.timeout_s);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);
    auto res = cli.Post(prefix + req.path, headers, req.body, "application/json");
    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

struct Completion {
  std::string text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  int attempts = 0;
};

// One endpoint, either role. Thread-safe.
class EndpointClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  EndpointClient(EndpointConfig cfg, std::shared_ptr<Transport> transport,
                 Sleeper sleeper = default_sleeper())
      : cfg_(std::move(cfg)),
        transport_(std::move(transport)),
        sleeper_(std::move(sleeper)),
        slots_(std::max(1, cfg_.max_in_flight)) {
    cfg_.validate();
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw ConfigError("endpoint '" + cfg_.name + "': environment variable " +
                          cfg_.api_key_env + " is not set");
      }
      api_key_ = key;
    }
  }

  const EndpointConfig& config() const { return cfg_; }

  Completion complete(const std::string& prompt, const SamplingParams& params) {
    const nlohmann::json body = {
        {"model", cfg_.model_id},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"max_tokens", params.max_tokens}};
    int attempts = 0;
    const HttpResponse res = post_with_retry("/chat/completions", body.dump(), attempts);
    Completion out;
    out.attempts = attempts;
    try {
      const auto j = nlohmann::json::parse(res.body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      out.text = content.is_string() ? content.get<std::string>() : std::string();
      if (j.contains("usage") && j["usage"].is_object()) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
        out.completion_tokens = j["usage"].value("completion_tokens", 0LL);
      }
    } catch (const nlohmann::json::exception& e) {
      throw EndpointError("endpoint '" + cfg_.name + "': malformed completion payload: " + e.what());
    }
    return out;
  }

  // Scores are cached for the lifetime of the client, so repeated lookups
  // of one (query, response) return the identical value.
  double score(const std::string& query, const std::string& response) {
    const auto key = std::make_pair(query, response);
    {
      std::shared_lock lock(cache_mu_);
      if (auto it = score_cache_.find(key); it != score_cache_.end()) return it->second;
    }
    const nlohmann::json body = {{"query", query}, {"response", response}};
    int attempts = 0;
    const HttpResponse res = post_with_retry("/score", body.dump(), attempts);
    double value = 0.0;
    try {
      const auto j = nlohmann::json::parse(res.body);
      const auto& s = j.at("score");
      if (!s.is_number()) throw ScorerError("scorer '" + cfg_.name + "': score is not a number");
      value = s.get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ScorerError("scorer '" + cfg_.name + "': malformed payload: " + e.what());
    }
    if (!std::isfinite(value)) throw ScorerError("scorer '" + cfg_.name + "': non-finite score");
    std::unique_lock lock(cache_mu_);
    return score_cache_.try_emplace(key, value).first->second;
  }

  std::size_t cached_scores() const {
    std::shared_lock lock(cache_mu_);
    return score_cache_.size();
  }

 private:
  static Sleeper default_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  static bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

  HttpResponse post_with_retry(const std::string& path, const std::string& body, int& attempts) {
    HttpRequest req;
    req.base_url = cfg_.base_url;
    req.path = path;
    req.body = body;
    req.timeout_s = cfg_.timeout_s;
    if (!api_key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + api_key_);

    std::vector<std::string> log;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) sleeper_(backoff_delay(cfg_, attempt));
      ++attempts;
      HttpResponse res;
      {
        slots_.acquire();
        try {
          res = transport_->post(req);
        } catch (const std::exception& e) {
          res.status = 0;
          res.error = e.what();
        }
        slots_.release();
      }
      if (res.status >= 200 && res.status < 300) return res;
      log.push_back("attempt " + std::to_string(attempt + 1) + ": " +
                    (res.status == 0 ? "transport error: " + res.error
                                     : "HTTP " + std::to_string(res.status)));
      if (!retryable(res.status)) {
        throw RequestError("endpoint '" + cfg_.name + "': HTTP " + std::to_string(res.status) +
                               " (not retried)",
                           res.status);
      }
    }
    std::string what = "endpoint '" + cfg_.name + "': giving up after " +
                       std::to_string(log.size()) + " attempts";
    for (const auto& l : log) what += "\n  " + l;
    throw EndpointError(what, std::move(log));
  }

  EndpointConfig cfg_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleeper_;
  std::string api_key_;
  std::counting_semaphore<> slots_;
  mutable std::shared_mutex cache_mu_;
  std::map<std::pair<std::string, std::string>, double> score_cache_;
};

// CompletionSource over a live endpoint. Requests run on up to
// max_in_flight worker threads; results come back in request order.
class GatewaySource : public CompletionSource {
 public:
  GatewaySource(EndpointClient& client, SamplingParams params)
      : client_(client), params_(params) {}

  std::vector<CompletionResult> complete_all(const std::vector<CompletionRequest>& reqs) override {
    std::vector<CompletionResult> out(reqs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < reqs.size(); i = next++) {
        try {
          out[i].text = client_.complete(reqs[i].prompt, params_).text;
        } catch (const RequestError& e) {
          out[i].error = e.what();
          out[i].infrastructure_failure = true;
        } catch (const EndpointError& e) {
          out[i].error = e.what();
          out[i].infrastructure_failure = true;
        }
      }
    };
    const std::size_t n_workers =
        std::min<std::size_t>(reqs.size(), static_cast<std::size_t>(client_.config().max_in_flight));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    return out;
  }

 private:
  EndpointClient& client_;
  SamplingParams params_;
};

}  // namespace judgekit
