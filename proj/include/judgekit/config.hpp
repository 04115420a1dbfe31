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

// Run configuration (JSON). Every section is optional and defaulted;
// unknown keys and wrongly typed values are errors naming their path.

#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/advantage.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/evaluator.hpp"
#include "judgekit/gateway.hpp"
#include "judgekit/policy_sim.hpp"
#include "judgekit/reward.hpp"
#include "judgekit/synth.hpp"

namespace judgekit {

struct PathsConfig {
  std::string input_dir = ".";
  std::string output_dir = ".";
};

struct RunConfig {
  std::vector<EndpointConfig> endpoints;
  SamplingParams sampling;
  AdvantageConfig advantage;
  EvalConfig eval;
  Averaging averaging = Averaging::macro;
  SynthConfig synth;
  SimConfig sim;
  RewardMode reward_mode = RewardMode::s2j;
  // Default endpoint names; empty = none configured.
  std::string judge;
  std::string scorer;
  PathsConfig paths;

  const EndpointConfig& endpoint(const std::string& name) const {
    for (const auto& e : endpoints) {
      if (e.name == name) return e;
    }
    throw ConfigError("no endpoint named '" + name + "' in config");
  }
};

namespace detail {

// Typed access to one JSON object, remembering which keys were read.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& into) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_[key];
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      into = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(path_of(key) + ": wrong type (" + std::string(v.type_name()) + ")");
    }
  }

  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_[key] : nullptr;
  }

  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : path_; }

  // Throws on the first key that was never asked for.
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (seen_.count(k) == 0) throw ConfigError("unknown config key '" + path_of(k) + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void with_context(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  } catch (const InputError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline EndpointConfig parse_endpoint(const nlohmann::json& j, const std::string& path) {
  Section s(j, path);
  EndpointConfig e;
  std::string role = "chat";
  s.get("name", e.name);
  s.get("base_url", e.base_url);
  s.get("model_id", e.model_id);
  s.get("api_key_env", e.api_key_env);
  s.get("timeout_s", e.timeout_s);
  s.get("max_retries", e.max_retries);
  s.get("max_in_flight", e.max_in_flight);
  s.get("backoff_initial_ms", e.backoff_initial_ms);
  s.get("max_tokens_limit", e.max_tokens_limit);
  s.get("role", role);
  s.finish();
  if (role == "chat") {
    e.role = EndpointRole::chat;
  } else if (role == "scorer") {
    e.role = EndpointRole::scorer;
  } else {
    throw ConfigError(s.path_of("role") + ": must be 'chat' or 'scorer'");
  }
  with_context(path, [&] { e.validate(); });
  return e;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& root) {
  using detail::Section;
  using detail::with_context;
  RunConfig c;
  Section top(root, "");

  if (const auto* eps = top.child("endpoints")) {
    if (!eps->is_array()) throw ConfigError("endpoints: expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < eps->size(); ++i) {
      auto e = detail::parse_endpoint((*eps)[i], "endpoints[" + std::to_string(i) + "]");
      if (!names.insert(e.name).second) {
        throw ConfigError("endpoints[" + std::to_string(i) + "]: duplicate name '" + e.name + "'");
      }
      c.endpoints.push_back(std::move(e));
    }
  }

  if (const auto* j = top.child("sampling")) {
    Section s(*j, "sampling");
    s.get("temperature", c.sampling.temperature);
    s.get("top_p", c.sampling.top_p);
    s.get("max_tokens", c.sampling.max_tokens);
    s.finish();
  }
  c.sampling.validate();

  if (const auto* j = top.child("advantage")) {
    Section s(*j, "advantage");
    s.get("group_size", c.advantage.group_size);
    s.get("epsilon", c.advantage.epsilon);
    s.get("clip_low", c.advantage.clip_low);
    s.get("clip_high", c.advantage.clip_high);
    s.get("drop_uniform_groups", c.advantage.drop_uniform_groups);
    s.finish();
  }
  c.advantage.validate();

  if (const auto* j = top.child("eval")) {
    Section s(*j, "eval");
    std::string averaging = "macro";
    s.get("subsample_cap", c.eval.subsample_cap);
    s.get("seed", c.eval.seed);
    s.get("swap_positions", c.eval.swap_positions);
    s.get("max_failure_rate", c.eval.max_failure_rate);
    s.get("averaging", averaging);
    s.finish();
    with_context("eval.averaging", [&] { c.averaging = parse_averaging(averaging); });
  }
  c.eval.validate();

  if (const auto* j = top.child("synth")) {
    Section s(*j, "synth");
    std::string strategy = "first_valid";
    if (const auto* g = s.child("generators")) {
      if (!g->is_array()) throw ConfigError("synth.generators: expected an array of names");
      for (const auto& name : *g) {
        if (!name.is_string()) throw ConfigError("synth.generators: expected an array of names");
        c.synth.generators.push_back(name.get<std::string>());
      }
    }
    s.get("samples_per_query", c.synth.samples_per_query);
    s.get("pair_strategy", strategy);
    s.get("position_balance", c.synth.position_balance);
    s.get("seed", c.synth.seed);
    s.finish();
    with_context("synth.pair_strategy", [&] { c.synth.pair_strategy = parse_pair_strategy(strategy); });
  }
  c.synth.validate();

  if (const auto* j = top.child("sim")) {
    Section s(*j, "sim");
    s.get("group_size", c.sim.group_size);
    s.get("steps", c.sim.steps);
    s.get("learning_rate", c.sim.learning_rate);
    s.get("seed", c.sim.seed);
    s.get("coupling", c.sim.coupling);
    if (const auto* t = s.child("init_theta")) {
      if (!t->is_array() || t->size() != 2 || !(*t)[0].is_number() || !(*t)[1].is_number()) {
        throw ConfigError("sim.init_theta: expected [theta_solve, theta_judge]");
      }
      c.sim.init_theta = {(*t)[0].get<double>(), (*t)[1].get<double>()};
    }
    s.finish();
  }
  c.sim.validate();

  std::string mode = "s2j";
  top.get("reward_mode", mode);
  with_context("reward_mode", [&] { c.reward_mode = parse_reward_mode(mode); });
  c.sim.mode = c.reward_mode;
  top.get("judge", c.judge);
  top.get("scorer", c.scorer);

  if (const auto* j = top.child("paths")) {
    Section s(*j, "paths");
    s.get("input_dir", c.paths.input_dir);
    s.get("output_dir", c.paths.output_dir);
    s.finish();
  }
  top.finish();

  // Cross-references.
  auto require = [&](const std::string& name, const std::string& path, EndpointRole role) {
    const EndpointConfig* found = nullptr;
    for (const auto& e : c.endpoints) {
      if (e.name == name) found = &e;
    }
    if (found == nullptr) throw ConfigError(path + ": no endpoint named '" + name + "'");
    if (found->role != role) {
      throw ConfigError(path + ": endpoint '" + name + "' has the wrong role");
    }
  };
  for (std::size_t i = 0; i < c.synth.generators.size(); ++i) {
    require(c.synth.generators[i], "synth.generators[" + std::to_string(i) + "]", EndpointRole::chat);
  }
  if (!c.judge.empty()) require(c.judge, "judge", EndpointRole::chat);
  if (!c.scorer.empty()) require(c.scorer, "scorer", EndpointRole::scorer);
  for (std::size_t i = 0; i < c.endpoints.size(); ++i) {
    const auto& e = c.endpoints[i];
    if (e.role == EndpointRole::chat && e.max_tokens_limit > 0 &&
        c.sampling.max_tokens > e.max_tokens_limit) {
      throw ConfigError("sampling.max_tokens: " + std::to_string(c.sampling.max_tokens) +
                        " exceeds endpoints[" + std::to_string(i) + "].max_tokens_limit (" +
                        std::to_string(e.max_tokens_limit) + ")");
    }
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace judgekit
