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

// Two-bit policy simulator for comparing reward modes.
//
// A trajectory is (solved, judged). The policy has two logits and a fixed
// coupling beta:
//   P(solved)            = sigmoid(theta_solve)
//   P(judged | solved)   = sigmoid(theta_judge + beta)
//   P(judged | unsolved) = sigmoid(theta_judge - beta)
// Training is REINFORCE with group-normalized advantages. The gap is
// P(judged = 0 | solved = 1) = 1 - sigmoid(theta_judge + beta).

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/advantage.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/reward.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct SimPolicy {
  double theta_solve = -0.5;
  double theta_judge = -0.5;
  double coupling = 1.5;

  double p_solve() const { return logistic(theta_solve); }
  double p_judge_given_solved() const { return logistic(theta_judge + coupling); }
  double p_judge_given_unsolved() const { return logistic(theta_judge - coupling); }
  double j_acc() const {
    const double ps = p_solve();
    return ps * p_judge_given_solved() + (1.0 - ps) * p_judge_given_unsolved();
  }
  double gap() const { return 1.0 - p_judge_given_solved(); }

  bool operator==(const SimPolicy&) const = default;
};

struct SimConfig {
  int group_size = 16;
  int steps = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  RewardMode mode = RewardMode::s2j;
  std::array<double, 2> init_theta = {-0.5, -0.5};
  double coupling = 1.5;

  void validate() const {
    if (group_size < 2) throw ConfigError("sim.group_size must be >= 2");
    if (steps < 1) throw ConfigError("sim.steps must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("sim.learning_rate must be > 0");
    }
    if (!(coupling > 0.0) || !std::isfinite(coupling)) throw ConfigError("sim.coupling must be > 0");
  }

  SimPolicy initial_policy() const { return {init_theta[0], init_theta[1], coupling}; }
};

struct SimMetrics {
  int step = 0;
  double p_solve = 0.0;
  double j_acc = 0.0;
  double gap = 0.0;
  double mean_reward = 0.0;
};

struct SimOutcome {
  bool solved = false;
  bool judged = false;
};

inline SimOutcome sample_trajectory(const SimPolicy& p, Rng& rng) {
  SimOutcome o;
  o.solved = rng.bernoulli(p.p_solve());
  o.judged = rng.bernoulli(o.solved ? p.p_judge_given_solved() : p.p_judge_given_unsolved());
  return o;
}

inline double sim_reward(bool solved, bool judged, RewardMode mode) {
  switch (mode) {
    case RewardMode::s2j: return 0.5 * solved + 0.5 * judged;
    case RewardMode::judge_only: return judged ? 1.0 : 0.0;
    case RewardMode::solve_only: return solved ? 1.0 : 0.0;
  }
  return 0.0;
}

// d/d(theta_solve, theta_judge) of log P(outcome).
inline std::array<double, 2> score_function(const SimPolicy& p, SimOutcome o) {
  const double pj = o.solved ? p.p_judge_given_solved() : p.p_judge_given_unsolved();
  return {(o.solved ? 1.0 : 0.0) - p.p_solve(), (o.judged ? 1.0 : 0.0) - pj};
}

inline double outcome_probability(const SimPolicy& p, SimOutcome o) {
  const double ps = o.solved ? p.p_solve() : 1.0 - p.p_solve();
  const double pj1 = o.solved ? p.p_judge_given_solved() : p.p_judge_given_unsolved();
  return ps * (o.judged ? pj1 : 1.0 - pj1);
}

inline constexpr SimOutcome kAllOutcomes[] = {{false, false}, {false, true}, {true, false}, {true, true}};

inline double expected_reward(const SimPolicy& p, RewardMode mode) {
  double e = 0.0;
  for (SimOutcome o : kAllOutcomes) e += outcome_probability(p, o) * sim_reward(o.solved, o.judged, mode);
  return e;
}

// Exact gradient of expected_reward, as sum over outcomes of
// P(o) r(o) grad log P(o).
inline std::array<double, 2> expected_gradient(const SimPolicy& p, RewardMode mode) {
  std::array<double, 2> g = {0.0, 0.0};
  for (SimOutcome o : kAllOutcomes) {
    const double w = outcome_probability(p, o) * sim_reward(o.solved, o.judged, mode);
    const auto s = score_function(p, o);
    g[0] += w * s[0];
    g[1] += w * s[1];
  }
  return g;
}

inline SimMetrics metrics_of(const SimPolicy& p, int step, double mean_reward) {
  return {step, p.p_solve(), p.j_acc(), p.gap(), mean_reward};
}

// One REINFORCE update on a freshly sampled group. Metrics describe the
// updated policy and the sampled group's mean reward.
inline std::pair<SimPolicy, SimMetrics> step_policy(const SimPolicy& policy, const SimConfig& cfg,
                                                    Rng& rng, int step = 0) {
  const auto n = static_cast<std::size_t>(cfg.group_size);
  std::vector<SimOutcome> group(n);
  std::vector<double> rewards(n);
  double mean_reward = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    group[i] = sample_trajectory(policy, rng);
    rewards[i] = sim_reward(group[i].solved, group[i].judged, cfg.mode);
    mean_reward += rewards[i];
  }
  mean_reward /= static_cast<double>(n);

  AdvantageConfig acfg;
  acfg.group_size = cfg.group_size;
  const auto adv = group_advantages(rewards, acfg);

  std::array<double, 2> g = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = score_function(policy, group[i]);
    g[0] += adv[i] * s[0];
    g[1] += adv[i] * s[1];
  }
  SimPolicy next = policy;
  next.theta_solve += cfg.learning_rate * g[0] / static_cast<double>(n);
  next.theta_judge += cfg.learning_rate * g[1] / static_cast<double>(n);
  if (!std::isfinite(next.theta_solve) || !std::isfinite(next.theta_judge)) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "non-finite policy update at step %d: theta_solve=%.17g theta_judge=%.17g "
                  "coupling=%.17g grad=(%.17g, %.17g) lr=%.17g",
                  step, policy.theta_solve, policy.theta_judge, policy.coupling, g[0], g[1],
                  cfg.learning_rate);
    throw NumericalError(buf);
  }
  return {next, metrics_of(next, step, mean_reward)};
}

struct TrialResult {
  SimPolicy final_policy;
  // Entry 0 is the initial policy (mean_reward = its expected reward).
  std::vector<SimMetrics> metrics;
};

inline TrialResult run_trial(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SimPolicy p = cfg.initial_policy();
  TrialResult out;
  out.metrics.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  out.metrics.push_back(metrics_of(p, 0, expected_reward(p, cfg.mode)));
  for (int s = 1; s <= cfg.steps; ++s) {
    auto [next, m] = step_policy(p, cfg, rng, s);
    p = next;
    out.metrics.push_back(m);
  }
  out.final_policy = p;
  return out;
}

inline constexpr RewardMode kAllModes[] = {RewardMode::s2j, RewardMode::judge_only,
                                           RewardMode::solve_only};

struct ModeSummary {
  RewardMode mode = RewardMode::s2j;
  std::vector<double> final_gap;      // per trial
  std::vector<double> final_p_solve;  // per trial
  double mean_gap = 0.0;
  double mean_p_solve = 0.0;
};

struct ComparisonReport {
  SimConfig base;
  int trials = 0;
  double initial_gap = 0.0;
  double initial_p_solve = 0.0;
  std::array<ModeSummary, 3> modes;  // s2j, judge_only, solve_only
  // Per-trial counts.
  int s2j_below_judge_only = 0;
  int judge_only_below_initial = 0;
  int s2j_below_initial = 0;
  int solve_only_not_below_judge_only = 0;

  const ModeSummary& of(RewardMode m) const { return modes[static_cast<std::size_t>(m)]; }
  bool s2j_beats_judge_only() const { return of(RewardMode::s2j).mean_gap < of(RewardMode::judge_only).mean_gap; }
  bool s2j_beats_initial() const { return of(RewardMode::s2j).mean_gap < initial_gap; }
};

// Trial t uses seed base.seed + t for every mode. Trials run in parallel;
// each owns its stream, so the report does not depend on scheduling.
inline ComparisonReport run_comparison(const SimConfig& base, int trials) {
  base.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  ComparisonReport rep;
  rep.base = base;
  rep.trials = trials;
  const SimPolicy init = base.initial_policy();
  rep.initial_gap = init.gap();
  rep.initial_p_solve = init.p_solve();

  const auto nt = static_cast<std::size_t>(trials);
  for (std::size_t m = 0; m < 3; ++m) {
    rep.modes[m].mode = kAllModes[m];
    rep.modes[m].final_gap.assign(nt, 0.0);
    rep.modes[m].final_p_solve.assign(nt, 0.0);
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t w = 0; w < std::min(hw, nt * 3); ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t job = w; job < nt * 3; job += std::min(hw, nt * 3)) {
          const std::size_t m = job % 3;
          const std::size_t t = job / 3;
          SimConfig cfg = base;
          cfg.mode = kAllModes[m];
          cfg.seed = base.seed + t;
          const TrialResult r = run_trial(cfg);
          rep.modes[m].final_gap[t] = r.final_policy.gap();
          rep.modes[m].final_p_solve[t] = r.final_policy.p_solve();
        }
      });
    }
  }
  for (auto& ms : rep.modes) {
    for (std::size_t t = 0; t < nt; ++t) {
      ms.mean_gap += ms.final_gap[t];
      ms.mean_p_solve += ms.final_p_solve[t];
    }
    ms.mean_gap /= static_cast<double>(nt);
    ms.mean_p_solve /= static_cast<double>(nt);
  }
  const auto& s2j = rep.of(RewardMode::s2j).final_gap;
  const auto& jo = rep.of(RewardMode::judge_only).final_gap;
  const auto& so = rep.of(RewardMode::solve_only).final_gap;
  for (std::size_t t = 0; t < nt; ++t) {
    rep.s2j_below_judge_only += s2j[t] < jo[t];
    rep.judge_only_below_initial += jo[t] < rep.initial_gap;
    rep.s2j_below_initial += s2j[t] < rep.initial_gap;
    rep.solve_only_not_below_judge_only += !(so[t] < jo[t]);
  }
  return rep;
}

inline std::string comparison_header(const SimConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "# Assumption: fixed coupling beta=%g between solving and judging; beta is not "
                "learned.\n"
                "# P(s)=sigmoid(ts), P(j|s)=sigmoid(tj+beta), P(j|not s)=sigmoid(tj-beta); "
                "gap = P(j=0|s=1)\n"
                "# group_size=%d steps=%d lr=%g init=(%g, %g) seed=%llu\n",
                c.coupling, c.group_size, c.steps, c.learning_rate, c.init_theta[0],
                c.init_theta[1], static_cast<unsigned long long>(c.seed));
  return buf;
}

inline std::string render_comparison_table(const ComparisonReport& r) {
  std::string out = comparison_header(r.base);
  char buf[256];
  std::snprintf(buf, sizeof buf, "# trials=%d\n\n%-12s %10s %10s\n", r.trials, "mode", "gap",
                "p_solve");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12s %10.4f %10.4f\n", "initial", r.initial_gap,
                r.initial_p_solve);
  out += buf;
  for (const auto& m : r.modes) {
    std::snprintf(buf, sizeof buf, "%-12s %10.4f %10.4f\n", std::string(to_string(m.mode)).c_str(),
                  m.mean_gap, m.mean_p_solve);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "\ngap(s2j) < gap(judge_only): %s (%d/%d trials)\n"
                "gap(s2j) < gap(initial): %s (%d/%d trials)\n"
                "gap(judge_only) < gap(initial): %d/%d trials\n"
                "gap(solve_only) >= gap(judge_only): %d/%d trials\n",
                r.s2j_beats_judge_only() ? "yes" : "no", r.s2j_below_judge_only, r.trials,
                r.s2j_beats_initial() ? "yes" : "no", r.s2j_below_initial, r.trials,
                r.judge_only_below_initial, r.trials, r.solve_only_not_below_judge_only, r.trials);
  out += buf;
  return out;
}

inline nlohmann::json comparison_to_json(const ComparisonReport& r) {
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& m : r.modes) {
    modes[std::string(to_string(m.mode))] = {{"mean_gap", m.mean_gap},
                                             {"mean_p_solve", m.mean_p_solve},
                                             {"final_gap", m.final_gap},
                                             {"final_p_solve", m.final_p_solve}};
  }
  return {{"schema", "simulation.v1"},
          {"version", "1.0"},
          {"assumption", "fixed coupling beta between solving and judging; beta is not learned"},
          {"config",
           {{"group_size", r.base.group_size},
            {"steps", r.base.steps},
            {"learning_rate", r.base.learning_rate},
            {"coupling", r.base.coupling},
            {"init_theta", r.base.init_theta},
            {"seed", r.base.seed}}},
          {"trials", r.trials},
          {"initial_gap", r.initial_gap},
          {"initial_p_solve", r.initial_p_solve},
          {"modes", modes},
          {"flags",
           {{"s2j_below_judge_only", r.s2j_beats_judge_only()},
            {"s2j_below_initial", r.s2j_beats_initial()},
            {"trials_s2j_below_judge_only", r.s2j_below_judge_only},
            {"trials_s2j_below_initial", r.s2j_below_initial},
            {"trials_judge_only_below_initial", r.judge_only_below_initial},
            {"trials_solve_only_not_below_judge_only", r.solve_only_not_below_judge_only}}}};
}

// Per-step metrics as CSV.
inline std::string metrics_csv(const std::vector<SimMetrics>& ms) {
  std::string out = "step,p_solve,j_acc,gap,mean_reward\n";
  char buf[160];
  for (const auto& m : ms) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", m.step, m.p_solve, m.j_acc,
                  m.gap, m.mean_reward);
    out += buf;
  }
  return out;
}

}  // namespace judgekit
