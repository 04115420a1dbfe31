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

// Composite reward for judge trajectories.
//
//   r_judge = 0.5 if the verdict matches the label, else 0
//   r_solve = 0.5 if the self-solution is correct, else 0
//
// Objective tasks grade the self-solution with the rule-based verifier.
// Subjective tasks grade it with an auxiliary scalar scorer: the
// self-solution earns 0.5 when its score is strictly closer to the better
// response's score than to the worse one's, and only when the scorer
// itself ranks the pair correctly (s_better > s_worse). When that gate
// fails, the trajectory is rewarded on judging alone.
//
// Modes:
//   s2j         total = r_solve + r_judge          in {0, 0.5, 1}
//   judge_only  total = 2 * r_judge, r_solve = 0    in {0, 1}
//   solve_only  total = 2 * r_solve, r_judge = 0    in {0, 1}

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "judgekit/errors.hpp"
#include "judgekit/preference_pair.hpp"
#include "judgekit/trajectory.hpp"
#include "judgekit/verifier.hpp"

namespace judgekit {

enum class RewardMode { s2j, judge_only, solve_only };

inline std::string_view to_string(RewardMode m) {
  switch (m) {
    case RewardMode::s2j: return "s2j";
    case RewardMode::judge_only: return "judge_only";
    case RewardMode::solve_only: return "solve_only";
  }
  return "s2j";
}

inline RewardMode parse_reward_mode(std::string_view s) {
  if (s == "s2j") return RewardMode::s2j;
  if (s == "judge_only") return RewardMode::judge_only;
  if (s == "solve_only") return RewardMode::solve_only;
  throw InputError("unknown reward mode '" + std::string(s) + "'");
}

constexpr bool involves_solving(RewardMode m) { return m != RewardMode::judge_only; }

// Auxiliary scorer outputs for one instance. All three must come from the
// same scorer on the same query.
struct ScoreTriple {
  double s_better = 0.0;
  double s_worse = 0.0;
  double s_self = 0.0;

  // Stand-in used when the scorer is unreachable: it fails the
  // s_better > s_worse gate, so the solve component is 0.
  static constexpr ScoreTriple unavailable() { return {0.0, 0.0, 0.0}; }
};

struct RewardBreakdown {
  double r_solve = 0.0;
  double r_judge = 0.0;
  double total = 0.0;
  RewardMode mode = RewardMode::s2j;

  bool operator==(const RewardBreakdown&) const = default;
};

inline double judge_reward(std::optional<Verdict> verdict, Verdict label) {
  return verdict && *verdict == label ? 0.5 : 0.0;
}

inline double solve_reward_objective(const std::optional<std::string>& self_solution,
                                     std::string_view truth) {
  if (truth.empty()) throw ConfigError("objective instance has an empty ground truth");
  if (!self_solution) return 0.0;
  return verify(std::string_view(*self_solution), truth) == 1 ? 0.5 : 0.0;
}

inline double solve_reward_subjective(const ScoreTriple& s) {
  if (!std::isfinite(s.s_better) || !std::isfinite(s.s_worse) || !std::isfinite(s.s_self)) {
    throw InputError("solve_reward_subjective: non-finite score");
  }
  if (!(s.s_better > s.s_worse)) return 0.0;
  return std::abs(s.s_self - s.s_better) < std::abs(s.s_self - s.s_worse) ? 0.5 : 0.0;
}

// `scores` must be present exactly when the instance is subjective and the
// mode grades solving.
inline RewardBreakdown total_reward(const Trajectory& traj, const PreferencePair& instance,
                                    const std::optional<ScoreTriple>& scores,
                                    RewardMode mode) {
  const bool needs_scores = instance.kind == TaskKind::subjective && involves_solving(mode);
  if (needs_scores && !scores) {
    throw InputError("instance '" + instance.id + "': subjective task needs aux scores in " +
                     std::string(to_string(mode)) + " mode");
  }
  if (!needs_scores && scores) {
    throw InputError("instance '" + instance.id + "': aux scores given but not used");
  }

  RewardBreakdown out;
  out.mode = mode;
  const double r_judge = judge_reward(traj.verdict, instance.label);
  double r_solve = 0.0;
  if (involves_solving(mode)) {
    if (instance.kind == TaskKind::objective) {
      if (!instance.ground_truth) {
        throw ConfigError("instance '" + instance.id + "': objective task without ground truth");
      }
      r_solve = solve_reward_objective(traj.self_solution, *instance.ground_truth);
    } else {
      // A missing self-solution cannot be scored, so it earns nothing.
      r_solve = traj.self_solution ? solve_reward_subjective(*scores) : 0.0;
    }
  }

  switch (mode) {
    case RewardMode::s2j:
      out.r_solve = r_solve;
      out.r_judge = r_judge;
      out.total = r_solve + r_judge;
      break;
    case RewardMode::judge_only:
      out.r_judge = r_judge;
      out.total = 2.0 * r_judge;
      break;
    case RewardMode::solve_only:
      out.r_solve = r_solve;
      out.total = 2.0 * r_solve;
      break;
  }
  return out;
}

}  // namespace judgekit
