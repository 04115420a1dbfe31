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

// Where completions come from: a live endpoint, a replay cache, or a live
// endpoint whose answers are recorded into a cache.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

struct CompletionRequest {
  std::string prompt;
  // Distinguishes repeated samples of one prompt (rollout groups).
  int sample = 0;
};

struct CompletionResult {
  std::optional<std::string> text;
  std::string error;
  // Failure came from the transport or service, not from the model.
  bool infrastructure_failure = false;

  bool ok() const { return text.has_value(); }
};

class CompletionSource {
 public:
  virtual ~CompletionSource() = default;
  // One result per request, in request order.
  virtual std::vector<CompletionResult> complete_all(const std::vector<CompletionRequest>& reqs) = 0;
};

inline std::string cache_key(const CompletionRequest& r) {
  return hex64(fnv1a64(r.prompt)) + ":" + std::to_string(r.prompt.size()) + ":" +
         std::to_string(r.sample);
}

inline constexpr const char* kCompletionFamily = "completions";

// completions.v1: header, then {"key", "text"} records sorted by key.
class CompletionCache {
 public:
  CompletionCache() = default;

  static CompletionCache load(const std::string& path) {
    CompletionCache c;
    const JsonlFile f = read_jsonl(path, kCompletionFamily);
    for (const auto& r : f.records) {
      if (!r.contains("key") || !r.contains("text") || !r["key"].is_string() ||
          !r["text"].is_string()) {
        throw FormatError(path + ": completion record needs string 'key' and 'text'");
      }
      c.entries_[r["key"].get<std::string>()] = r["text"].get<std::string>();
    }
    return c;
  }

  void save(const std::string& path) const {
    std::vector<json> rec;
    rec.push_back(make_header(kCompletionFamily, {{"count", entries_.size()}}));
    for (const auto& [k, v] : entries_) rec.push_back({{"key", k}, {"text", v}});
    write_jsonl(path, rec);
  }

  const std::string* find(const CompletionRequest& r) const {
    auto it = entries_.find(cache_key(r));
    return it == entries_.end() ? nullptr : &it->second;
  }

  void put(const CompletionRequest& r, std::string text) { entries_[cache_key(r)] = std::move(text); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

// Serves only cached completions; misses are infrastructure failures.
class ReplaySource : public CompletionSource {
 public:
  explicit ReplaySource(CompletionCache cache) : cache_(std::move(cache)) {}

  std::vector<CompletionResult> complete_all(const std::vector<CompletionRequest>& reqs) override {
    std::vector<CompletionResult> out(reqs.size());
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      if (const std::string* t = cache_.find(reqs[i])) {
        out[i].text = *t;
      } else {
        out[i].error = "not in completion cache";
        out[i].infrastructure_failure = true;
      }
    }
    return out;
  }

 private:
  CompletionCache cache_;
};

// Serves cache hits, forwards misses to `live`, and records what it got.
class RecordingSource : public CompletionSource {
 public:
  RecordingSource(CompletionSource& live, CompletionCache& cache) : live_(live), cache_(cache) {}

  std::vector<CompletionResult> complete_all(const std::vector<CompletionRequest>& reqs) override {
    std::vector<CompletionResult> out(reqs.size());
    std::vector<CompletionRequest> misses;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      if (const std::string* t = cache_.find(reqs[i])) {
        out[i].text = *t;
      } else {
        misses.push_back(reqs[i]);
        where.push_back(i);
      }
    }
    if (!misses.empty()) {
      auto fetched = live_.complete_all(misses);
      for (std::size_t k = 0; k < fetched.size(); ++k) {
        if (fetched[k].ok()) cache_.put(misses[k], *fetched[k].text);
        out[where[k]] = std::move(fetched[k]);
      }
    }
    return out;
  }

 private:
  CompletionSource& live_;
  CompletionCache& cache_;
};

}  // namespace judgekit
