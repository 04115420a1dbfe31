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

// Pipeline records that are not owned by a single module:
//   qa.v1          {"id", "query", "answer", "subset"?}
//   trajectory.v1  {"instance_id", "sample", "kind", "prompt", "raw_text",
//                   "self_solution", "verdict"}
//   reward.v1      {"instance_id", "sample", "mode", "r_solve", "r_judge",
//                   "total", "scores_available"}
// pair.v1, record.v1, batch.v1 and completions.v1 live with their modules.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/reward.hpp"
#include "judgekit/trajectory.hpp"

namespace judgekit {

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw FormatError("record is not an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* n : known) ok = ok || k == n;
    if (!ok) throw FormatError("unknown field '" + k + "'");
  }
}

inline int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw FormatError(std::string("field '") + key + "' must be an integer");
  }
  return j[key].get<int>();
}

inline double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw FormatError(std::string("field '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

inline std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

template <typename T, typename Parse>
std::vector<T> read_family(const std::string& path, const char* family, Parse parse) {
  const JsonlFile f = read_jsonl(path, family);
  std::vector<T> out;
  out.reserve(f.records.size());
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    try {
      out.push_back(parse(f.records[i]));
    } catch (const FormatError& e) {
      throw FormatError(path + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename ToJson>
void write_family(const std::string& path, const char* family, const std::vector<T>& items,
                  ToJson to) {
  std::vector<json> lines;
  lines.reserve(items.size() + 1);
  lines.push_back(make_header(family, {{"count", items.size()}}));
  for (const auto& x : items) lines.push_back(to(x));
  write_jsonl(path, lines);
}

}  // namespace detail

// Verifiable question used as synthesis input.
struct QaItem {
  std::string id;
  std::string query;
  std::string answer;
  std::string subset;
};

inline constexpr const char* kQaFamily = "qa";

inline QaItem qa_from_json(const json& j) {
  detail::reject_unknown(j, {"id", "query", "answer", "subset"});
  QaItem q;
  q.id = detail::require_string(j, "id");
  q.query = detail::require_string(j, "query");
  q.answer = detail::require_string(j, "answer");
  if (q.answer.empty()) throw FormatError("qa '" + q.id + "': empty answer");
  q.subset = detail::optional_string(j, "subset").value_or("");
  return q;
}

inline json to_json(const QaItem& q) {
  json j = {{"id", q.id}, {"query", q.query}, {"answer", q.answer}};
  if (!q.subset.empty()) j["subset"] = q.subset;
  return j;
}

inline std::vector<QaItem> read_qa(const std::string& path) {
  return detail::read_family<QaItem>(path, kQaFamily, qa_from_json);
}

inline void write_qa(const std::string& path, const std::vector<QaItem>& items) {
  detail::write_family(path, kQaFamily, items, [](const QaItem& q) { return to_json(q); });
}

// One sampled rollout of the judge on one instance.
struct RolloutRecord {
  std::string instance_id;
  int sample = 0;
  TaskKind kind = TaskKind::objective;
  std::string prompt;
  Trajectory trajectory;

  bool operator==(const RolloutRecord&) const = default;
};

inline constexpr const char* kTrajectoryFamily = "trajectory";

inline json to_json(const RolloutRecord& r) {
  const auto& t = r.trajectory;
  return {{"instance_id", r.instance_id},
          {"sample", r.sample},
          {"kind", std::string(to_string(r.kind))},
          {"prompt", r.prompt},
          {"raw_text", t.raw_text},
          {"self_solution", t.self_solution ? json(*t.self_solution) : json(nullptr)},
          {"verdict", t.verdict ? json(std::string(to_string(*t.verdict))) : json(nullptr)}};
}

// Parsed fields are re-derived from raw_text so a hand-edited record
// cannot disagree with its own text.
inline RolloutRecord rollout_from_json(const json& j) {
  detail::reject_unknown(j, {"instance_id", "sample", "kind", "prompt", "raw_text",
                             "self_solution", "verdict"});
  RolloutRecord r;
  r.instance_id = detail::require_string(j, "instance_id");
  r.sample = detail::require_int(j, "sample");
  try {
    r.kind = parse_task_kind(detail::require_string(j, "kind"));
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
  r.prompt = detail::require_string(j, "prompt");
  r.trajectory = parse_trajectory(detail::require_string(j, "raw_text"), r.kind);
  return r;
}

inline std::vector<RolloutRecord> read_rollouts(const std::string& path) {
  return detail::read_family<RolloutRecord>(path, kTrajectoryFamily, rollout_from_json);
}

inline void write_rollouts(const std::string& path, const std::vector<RolloutRecord>& items) {
  detail::write_family(path, kTrajectoryFamily, items,
                       [](const RolloutRecord& r) { return to_json(r); });
}

struct RewardRecord {
  std::string instance_id;
  int sample = 0;
  RewardBreakdown reward;
  // False when a subjective instance fell back to the judge-only path
  // because the scorer failed.
  bool scores_available = true;
};

inline constexpr const char* kRewardFamily = "reward";

inline json to_json(const RewardRecord& r) {
  return {{"instance_id", r.instance_id},
          {"sample", r.sample},
          {"mode", std::string(to_string(r.reward.mode))},
          {"r_solve", r.reward.r_solve},
          {"r_judge", r.reward.r_judge},
          {"total", r.reward.total},
          {"scores_available", r.scores_available}};
}

inline RewardRecord reward_from_json(const json& j) {
  detail::reject_unknown(j, {"instance_id", "sample", "mode", "r_solve", "r_judge", "total",
                             "scores_available"});
  RewardRecord r;
  r.instance_id = detail::require_string(j, "instance_id");
  r.sample = detail::require_int(j, "sample");
  try {
    r.reward.mode = parse_reward_mode(detail::require_string(j, "mode"));
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
  r.reward.r_solve = detail::require_number(j, "r_solve");
  r.reward.r_judge = detail::require_number(j, "r_judge");
  r.reward.total = detail::require_number(j, "total");
  if (j.contains("scores_available")) {
    if (!j["scores_available"].is_boolean()) throw FormatError("'scores_available' must be boolean");
    r.scores_available = j["scores_available"].get<bool>();
  }
  return r;
}

inline std::vector<RewardRecord> read_rewards(const std::string& path) {
  return detail::read_family<RewardRecord>(path, kRewardFamily, reward_from_json);
}

inline void write_rewards(const std::string& path, const std::vector<RewardRecord>& items) {
  detail::write_family(path, kRewardFamily, items, [](const RewardRecord& r) { return to_json(r); });
}

}  // namespace judgekit
