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

// Group-relative advantages and zero-signal group filtering.
//
//   a_i = (r_i - mean(r)) / (std_pop(r) + epsilon),   a = 0 if r is uniform
//
// Clip ratios travel with the exported batch for the external trainer;
// nothing here applies them.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/errors.hpp"

namespace judgekit {

struct AdvantageConfig {
  int group_size = 16;
  double epsilon = 1e-6;
  double clip_low = 0.2;
  double clip_high = 0.28;
  bool drop_uniform_groups = true;

  void validate() const {
    if (group_size < 2) throw ConfigError("advantage.group_size must be >= 2");
    if (!(epsilon > 0.0)) throw ConfigError("advantage.epsilon must be > 0");
    if (!(clip_low > 0.0)) throw ConfigError("advantage.clip_low must be > 0");
    if (clip_high < clip_low) throw ConfigError("advantage.clip_high must be >= clip_low");
  }
};

struct RolloutGroup {
  std::string instance_id;
  std::string prompt;
  std::vector<std::string> responses;
  std::vector<double> rewards;
  std::optional<std::vector<double>> advantages;
  bool kept = false;
};

inline bool is_uniform(std::span<const double> r) {
  for (double x : r) {
    if (x != r.front()) return false;
  }
  return true;
}

inline std::vector<double> group_advantages(std::span<const double> rewards,
                                            const AdvantageConfig& cfg) {
  if (rewards.size() != static_cast<std::size_t>(cfg.group_size)) {
    throw InputError("group_advantages: expected " + std::to_string(cfg.group_size) +
                     " rewards, got " + std::to_string(rewards.size()));
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw InputError("group_advantages: non-finite reward");
  }
  std::vector<double> out(rewards.size(), 0.0);
  if (is_uniform(rewards)) return out;

  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double denom = std::sqrt(var / n) + cfg.epsilon;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

// Marks the group kept or dropped; kept groups get advantages, dropped
// groups carry none.
inline RolloutGroup filter_group(RolloutGroup group, const AdvantageConfig& cfg) {
  if (group.rewards.empty()) {
    throw InputError("filter_group: group '" + group.instance_id + "' has no rewards");
  }
  group.kept = !(cfg.drop_uniform_groups && is_uniform(group.rewards));
  if (group.kept) {
    group.advantages = group_advantages(group.rewards, cfg);
  } else {
    group.advantages.reset();
  }
  return group;
}

inline constexpr const char* kBatchSchema = "batch.v1";

// batch.v1: one header record, then one record per response of each kept
// group. Rewards and advantages are both exported.
inline std::vector<nlohmann::json> export_training_batch(const std::vector<RolloutGroup>& groups,
                                                         const AdvantageConfig& cfg) {
  std::size_t kept = 0;
  for (const auto& g : groups) {
    if (g.rewards.empty() || g.rewards.size() != g.responses.size()) {
      throw InputError("export_training_batch: group '" + g.instance_id + "' is not scored");
    }
    if (g.kept && (!g.advantages || g.advantages->size() != g.rewards.size())) {
      throw InputError("export_training_batch: kept group '" + g.instance_id +
                       "' has no advantages");
    }
    kept += g.kept ? 1 : 0;
  }

  std::vector<nlohmann::json> out;
  out.push_back({{"schema", kBatchSchema},
                 {"version", "1.0"},
                 {"group_size", cfg.group_size},
                 {"clip_low", cfg.clip_low},
                 {"clip_high", cfg.clip_high},
                 {"n_groups", groups.size()},
                 {"n_kept", kept},
                 {"n_dropped", groups.size() - kept}});
  for (const auto& g : groups) {
    if (!g.kept) continue;
    for (std::size_t i = 0; i < g.responses.size(); ++i) {
      out.push_back({{"instance_id", g.instance_id},
                     {"index", i},
                     {"prompt", g.prompt},
                     {"response", g.responses[i]},
                     {"reward", g.rewards[i]},
                     {"advantage", (*g.advantages)[i]},
                     {"clip_low", cfg.clip_low},
                     {"clip_high", cfg.clip_high},
                     {"kept", true}});
    }
  }
  return out;
}

}  // namespace judgekit
