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

// Acceptance checks. Prints one PASS/FAIL line per criterion; the expected
// values come from oracles written here, not from the library.
//
//   acceptance            run all criteria, exit 1 if any fail
//   acceptance --only N   run criterion N

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "judgekit/advantage.hpp"
#include "judgekit/evaluator.hpp"
#include "judgekit/policy_sim.hpp"
#include "judgekit/prompts.hpp"
#include "judgekit/reward.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/synth.hpp"
#include "judgekit/trajectory.hpp"

using namespace judgekit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few mismatches and flips the outcome to failed.
struct Check {
  Outcome& out;
  int shown = 0;
  void fail(const std::string& what) {
    out.pass = false;
    if (shown++ < 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- 1

Outcome reward_exactness() {
  Outcome o;
  Check c{o};
  enum class Part { correct, wrong, absent };
  const Part parts[] = {Part::correct, Part::wrong, Part::absent};
  const char* names[] = {"correct", "wrong", "absent"};

  PreferencePair inst;
  inst.id = "enum";
  inst.query = "What is 6 * 7?";
  inst.response_a = "\\boxed{42}";
  inst.response_b = "\\boxed{41}";
  inst.label = Verdict::A;
  inst.kind = TaskKind::objective;
  inst.ground_truth = "42";

  int cases = 0;
  for (Part v : parts) {
    for (Part s : parts) {
      std::string text = "Let me work it out.";
      if (s == Part::correct) text += " I get \\boxed{42}.";
      if (s == Part::wrong) text += " I get \\boxed{48}.";
      if (v == Part::correct) text += " Verdict: [[A]]";
      if (v == Part::wrong) text += " Verdict: [[B]]";
      const Trajectory t = parse_trajectory(text, TaskKind::objective);
      const double judge = v == Part::correct ? 1.0 : 0.0;
      const double solve = s == Part::correct ? 1.0 : 0.0;
      const std::pair<RewardMode, double> expect[] = {{RewardMode::s2j, 0.5 * judge + 0.5 * solve},
                                                      {RewardMode::judge_only, judge},
                                                      {RewardMode::solve_only, solve}};
      for (const auto& [mode, want] : expect) {
        ++cases;
        const double got = total_reward(t, inst, std::nullopt, mode).total;
        c.expect(got == want, std::string(to_string(mode)) + " verdict=" + names[int(v)] + " solve=" +
                                  names[int(s)] + " got " + fmt("%g", got));
      }
    }
  }

  // Subjective grid in eighths so every distance is exact.
  // {better, worse, self, expected solve component}
  struct Row {
    int better, worse, self;
    double want;
  };
  const Row grid[] = {
      {6, 2, 7, 0.5}, {6, 2, 6, 0.5}, {6, 2, 5, 0.5}, {6, 2, 8, 0.5}, {6, 2, 4, 0.0},  // 4 is equidistant
      {6, 2, 3, 0.0}, {6, 2, 2, 0.0}, {6, 2, 0, 0.0}, {8, 0, 5, 0.5}, {8, 0, 3, 0.0},
      {5, 4, 5, 0.5}, {5, 4, 4, 0.0}, {3, 3, 3, 0.0}, {3, 3, 8, 0.0},  // gate: tie
      {2, 6, 2, 0.0}, {2, 6, 1, 0.0}, {0, 8, 0, 0.0},                  // gate: better below worse
      {7, 1, 8, 0.5}, {7, 1, 4, 0.0}, {1, 0, 1, 0.5},
  };
  PreferencePair subj = inst;
  subj.kind = TaskKind::subjective;
  subj.ground_truth.reset();
  const Trajectory traj = parse_trajectory("<solution>mine</solution> [[A]]", TaskKind::subjective);
  for (const Row& r : grid) {
    ++cases;
    const ScoreTriple s{r.better / 8.0, r.worse / 8.0, r.self / 8.0};
    const double got = total_reward(traj, subj, s, RewardMode::s2j).total;
    c.expect(got == 0.5 + r.want, "subjective (" + std::to_string(r.better) + "," +
                                      std::to_string(r.worse) + "," + std::to_string(r.self) +
                                      ")/8 got " + fmt("%g", got));
    const double solo = total_reward(traj, subj, s, RewardMode::solve_only).total;
    c.expect(solo == 2 * r.want, "subjective solve_only mismatch");
  }
  o.detail = std::to_string(cases) + " cases" + (o.detail.empty() ? "" : ": " + o.detail);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome gap_oracle() {
  Outcome o;
  Check c{o};
  const std::pair<const char*, int> plan[] = {{"RewardBench", 337}, {"PPE", 337}, {"JudgeBench", 445}};
  std::vector<JudgeRecord> recs;
  Rng rng(7);
  for (const auto& [subset, fails] : plan) {
    for (int i = 0; i < 1000; ++i) {
      recs.push_back({std::string(subset) + "-s" + std::to_string(i), true, i >= fails, std::nullopt, subset});
    }
    // Unsolved items do not enter the gap.
    for (int i = 0; i < 400; ++i) {
      recs.push_back({std::string(subset) + "-u" + std::to_string(i), false, rng.bernoulli(0.5), std::nullopt,
                      subset});
    }
  }
  // Records in arbitrary order.
  rng.shuffle(recs);

  const auto reports = gap_reports_by_subset(recs, Averaging::macro);
  double sum = 0.0;
  for (const auto& [subset, fails] : plan) {
    const double want = std::round(fails / 1000.0 * 1000.0) / 10.0;
    sum += want;
    const auto it = reports.find(subset);
    if (it == reports.end() || !it->second.gap) {
      c.fail(std::string("no gap for ") + subset);
      continue;
    }
    const double got = std::round(*it->second.gap * 1000.0) / 10.0;
    c.expect(std::abs(got - want) <= 0.05, std::string(subset) + " gap " + fmt("%.1f", got));
  }
  const double macro_want = std::round(sum / 3.0 * 10.0) / 10.0;
  const auto avg = reports.find(kAverageRow);
  if (avg == reports.end() || !avg->second.gap) {
    c.fail("no average row");
  } else {
    const double got = std::round(*avg->second.gap * 1000.0) / 10.0;
    c.expect(std::abs(got - macro_want) <= 0.05 && std::abs(got - 37.3) <= 0.05,
             "macro " + fmt("%.1f", got));
    o.detail = "gaps 33.7/33.7/44.5, macro " + fmt("%.1f", got) + (o.detail.empty() ? "" : "; " + o.detail);
  }
  const std::string csv = render_report(reports, ReportFormat::csv);
  c.expect(csv.find("Average,") != std::string::npos && csv.find(",37.3,") != std::string::npos,
           "rendered report lacks the 37.3 average");
  return o;
}

// ---------------------------------------------------------------- 3

Outcome advantage_properties() {
  Outcome o;
  Check c{o};
  AdvantageConfig cfg;
  cfg.group_size = 16;
  Rng rng(2026);
  double worst_mean = 0.0, worst_shift = 0.0;
  int uniform = 0;
  for (int g = 0; g < 1000; ++g) {
    std::vector<double> r(16);
    const int shape = g % 4;
    for (double& x : r) {
      if (shape == 0) x = 0.5 * static_cast<double>(rng.below(3));  // s2j levels
      if (shape == 1) x = static_cast<double>(rng.below(2));
      if (shape == 2) x = rng.uniform01() * 4.0 - 2.0;
      if (shape == 3) x = 0.25;  // uniform
    }
    const auto a = group_advantages(r, cfg);
    if (is_uniform(r)) {
      ++uniform;
      for (double x : a) c.expect(x == 0.0, "uniform group gave a nonzero advantage");
      continue;
    }
    double mean = 0.0;
    for (double x : a) mean += x;
    mean /= 16.0;
    worst_mean = std::max(worst_mean, std::abs(mean));

    const double shift = rng.uniform01() * 10.0 - 5.0;
    std::vector<double> shifted = r;
    for (double& x : shifted) x += shift;
    const auto b = group_advantages(shifted, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) worst_shift = std::max(worst_shift, std::abs(a[i] - b[i]));
  }
  c.expect(worst_mean <= 1e-9, "mean " + fmt("%.3g", worst_mean));
  c.expect(worst_shift <= 1e-9, "shift " + fmt("%.3g", worst_shift));

  // Worked by hand: mean 0.5, population std sqrt(0.125).
  AdvantageConfig four = cfg;
  four.group_size = 4;
  const std::vector<double> hand = {1.0, 0.5, 0.0, 0.5};
  const double want[] = {1.4142, 0.0, -1.4142, 0.0};
  const auto got = group_advantages(hand, four);
  for (int i = 0; i < 4; ++i) c.expect(std::abs(got[i] - want[i]) <= 1e-4, "hand example slot " + std::to_string(i));

  o.detail = "max |mean| " + fmt("%.2g", worst_mean) + ", max shift diff " + fmt("%.2g", worst_shift) + ", " +
             std::to_string(uniform) + " uniform groups" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome synthesis_discard() {
  Outcome o;
  Check c{o};
  Rng rng(99);
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.pair_strategy = PairStrategy::random_valid;
  long emitted = 0, single_sided = 0, slot_a_first = 0, counted = 0;
  for (int q = 0; q < 10000; ++q) {
    const long truth = static_cast<long>(rng.below(100000)) - 5000;
    const std::string t = std::to_string(truth);
    const int n = 2 + static_cast<int>(rng.below(7));
    // 0: all correct, 1: all wrong, else mixed.
    const int mix = static_cast<int>(rng.below(6));
    std::vector<std::string> responses;
    std::vector<bool> correct;
    for (int i = 0; i < n; ++i) {
      bool ok = mix == 0 ? true : mix == 1 ? false : rng.bernoulli(0.5);
      const int style = static_cast<int>(rng.below(4));
      const long v = ok ? truth : truth + 1 + static_cast<long>(rng.below(50));
      const std::string s = std::to_string(v);
      std::string r;
      switch (style) {
        case 0: r = "So the result is \\boxed{" + s + "}."; break;
        case 1: r = "\\boxed{" + s + ".0}"; break;
        case 2: r = "Answer: \\boxed{\\frac{" + std::to_string(2 * v) + "}{2}}"; break;
        default: r = "$" + s + "$"; break;
      }
      responses.push_back(r);
      correct.push_back(ok);
    }
    bool any_ok = false, any_bad = false;
    for (bool b : correct) (b ? any_ok : any_bad) = true;

    const std::string query = "Q" + std::to_string(q) + ": evaluate the expression.";
    const auto pairs = synthesize_pairs(query, t, responses, cfg);
    if (!(any_ok && any_bad)) {
      ++single_sided;
      c.expect(pairs.empty(), "pair emitted for single-sided query " + std::to_string(q));
      continue;
    }
    c.expect(pairs.size() == 1, "no pair for mixed query " + std::to_string(q));
    for (const auto& p : pairs) {
      ++emitted;
      const std::string& pref = p.label == Verdict::A ? p.response_a : p.response_b;
      const std::string& rej = p.label == Verdict::A ? p.response_b : p.response_a;
      bool pref_ok = false, rej_bad = false;
      for (int i = 0; i < n; ++i) {
        if (responses[i] == pref && correct[i]) pref_ok = true;
        if (responses[i] == rej && !correct[i]) rej_bad = true;
      }
      c.expect(pref_ok && rej_bad, "wrong preference in query " + std::to_string(q));
      c.expect(verify(std::string_view(response_answer(pref)), t) == 1 &&
                   verify(std::string_view(response_answer(rej)), t) == 0,
               "verifier disagrees in query " + std::to_string(q));
      if (counted < 1000) {
        ++counted;
        if (p.label == Verdict::A) ++slot_a_first;
      }
    }
  }
  const double frac = static_cast<double>(slot_a_first) / static_cast<double>(std::max(counted, 1L));
  c.expect(counted == 1000 && frac >= 0.45 && frac <= 0.55, "slot-A share " + fmt("%.3f", frac));
  o.detail = std::to_string(emitted) + " pairs, " + std::to_string(single_sided) +
             " single-sided queries, slot-A share " + fmt("%.3f", frac) + " over first 1000" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------- 5

// Expected reward by a randomly shifted rank-1 lattice (Fibonacci
// generator). The same points are reused at every parameter value, so the
// central difference sees only the change in the policy.
class LatticeEstimator {
 public:
  static constexpr std::uint64_t kN = 1346269;  // F(31)
  static constexpr std::uint64_t kG = 832040;   // F(30)

  explicit LatticeEstimator(std::uint64_t seed) {
    Rng rng(seed);
    shift_ = {rng.uniform01(), rng.uniform01()};
  }

  double expected(double theta_s, double theta_j, double beta, RewardMode mode) const {
    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    const double ps = sig(theta_s), pjs = sig(theta_j + beta), pju = sig(theta_j - beta);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < kN; ++i) {
      double u1 = static_cast<double>(i) / kN + shift_[0];
      double u2 = static_cast<double>((i * kG) % kN) / kN + shift_[1];
      u1 -= std::floor(u1);
      u2 -= std::floor(u2);
      const bool solved = u1 < ps;
      const bool judged = u2 < (solved ? pjs : pju);
      switch (mode) {
        case RewardMode::s2j: sum += 0.5 * solved + 0.5 * judged; break;
        case RewardMode::judge_only: sum += judged; break;
        case RewardMode::solve_only: sum += solved; break;
      }
    }
    return sum / kN;
  }

 private:
  std::array<double, 2> shift_{};
};

Outcome gradient_check() {
  Outcome o;
  Check c{o};
  const LatticeEstimator est(11);
  const double h = 0.02;
  const double beta = 1.5;
  const std::array<double, 2> points[] = {{-0.5, -0.5}, {0.4, -1.2}, {1.1, 0.7}};
  double worst = 0.0;
  for (const auto& pt : points) {
    for (RewardMode mode : kAllModes) {
      const auto analytic = expected_gradient(SimPolicy{pt[0], pt[1], beta}, mode);
      const double fd_s = (est.expected(pt[0] + h, pt[1], beta, mode) - est.expected(pt[0] - h, pt[1], beta, mode)) /
                          (2 * h);
      const double fd_j = (est.expected(pt[0], pt[1] + h, beta, mode) - est.expected(pt[0], pt[1] - h, beta, mode)) /
                          (2 * h);
      const double err = std::max(std::abs(fd_s - analytic[0]), std::abs(fd_j - analytic[1]));
      worst = std::max(worst, err);
      c.expect(err <= 1e-4, std::string(to_string(mode)) + " at (" + fmt("%g", pt[0]) + "," + fmt("%g", pt[1]) +
                                ") err " + fmt("%.2g", err));
    }
  }
  o.detail = "max |fd - analytic| " + fmt("%.2g", worst) + " over 3 points x 3 modes, " +
             std::to_string(LatticeEstimator::kN) + " samples" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---------------------------------------------------------------- 6

Outcome ablation_ordering() {
  Outcome o;
  SimConfig base;  // group 16, 500 steps, lr 0.1
  const ComparisonReport r = run_comparison(base, 10);
  const int a = r.s2j_below_judge_only;
  const int b = r.judge_only_below_initial;
  const int d = r.solve_only_not_below_judge_only;
  o.pass = a >= 9 && b >= 9 && d >= 9;
  o.detail = "gap(s2j)<gap(judge_only) " + std::to_string(a) + "/10, gap(judge_only)<gap(initial) " +
             std::to_string(b) + "/10, solve_only not below judge_only " + std::to_string(d) +
             "/10; mean final gap s2j " + fmt("%.3f", r.of(RewardMode::s2j).mean_gap) + ", judge_only " +
             fmt("%.3f", r.of(RewardMode::judge_only).mean_gap) + ", initial " +
             fmt("%.3f", base.initial_policy().gap());
  return o;
}

// ---------------------------------------------------------------- 7

Outcome prompt_fidelity() {
  Outcome o;
  Check c{o};
  const PromptKind kinds[] = {PromptKind::s2j_objective, PromptKind::s2j_subjective, PromptKind::baseline_instruct,
                              PromptKind::baseline_reasoner};
  for (PromptKind k : kinds) {
    const std::string name(to_string(k));
    const std::string gold = slurp(fs::path(JUDGEKIT_TEST_DATA) / "golden" / (name + ".txt"));
    if (gold.empty()) {
      c.fail("missing golden " + name);
      continue;
    }
    // Identity rendering reproduces the template bytes.
    c.expect(render_prompt(k, "{question}", "{answer_a}", "{answer_b}") == gold, name + " identity render");

    // Substitution oracle: plain find/replace on the golden.
    std::string want = gold;
    const std::pair<std::string, std::string> subs[] = {
        {"{question}", "Is 91 prime?"}, {"{answer_a}", "No, 7 * 13."}, {"{answer_b}", "Yes."}};
    for (const auto& [from, to] : subs) {
      for (std::size_t at = want.find(from); at != std::string::npos; at = want.find(from, at + to.size())) {
        want.replace(at, from.size(), to);
      }
    }
    c.expect(render_prompt(k, "Is 91 prime?", "No, 7 * 13.", "Yes.") == want, name + " substituted render");
  }
  if (o.pass) o.detail = "4 templates byte-identical";
  return o;
}

// ---------------------------------------------------------------- 8

Outcome replay_determinism() {
  Outcome o;
  Check c{o};
  const fs::path sample = fs::path(JUDGEKIT_SAMPLES) / "replay";
  const fs::path work = fs::temp_directory_path() / ("judgekit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);
  auto sh = [](const fs::path& p) { return "'" + p.string() + "'"; };
  std::string reports[2], tables[2], records[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path rec = work / ("records" + std::to_string(run) + ".jsonl");
    const fs::path csv = work / ("report" + std::to_string(run) + ".csv");
    const fs::path table = work / ("report" + std::to_string(run) + ".txt");
    const std::string cli = sh(JUDGEKIT_CLI);
    const std::string eval = cli + " --in " + sh(sample / "bench.jsonl") + " --out " + sh(rec) +
                             " evaluate --with-gt --replay " + sh(sample / "completions.jsonl") + " 2>/dev/null";
    const std::string gap_csv = cli + " --in " + sh(rec) + " --out " + sh(csv) + " gap-report --format csv";
    const std::string gap_table = cli + " --in " + sh(rec) + " --out " + sh(table) + " gap-report";
    c.expect(std::system(eval.c_str()) == 0, "evaluate failed on run " + std::to_string(run + 1));
    c.expect(std::system(gap_csv.c_str()) == 0, "gap-report failed on run " + std::to_string(run + 1));
    c.expect(std::system(gap_table.c_str()) == 0, "gap-report table failed on run " + std::to_string(run + 1));
    records[run] = slurp(rec);
    reports[run] = slurp(csv);
    tables[run] = slurp(table);
  }
  c.expect(!reports[0].empty() && reports[0] == reports[1], "csv reports differ between runs");
  c.expect(tables[0] == tables[1], "table reports differ between runs");
  c.expect(records[0] == records[1], "records differ between runs");
  c.expect(reports[0] == slurp(sample / "expected_report.csv"), "csv report differs from checked-in golden");
  c.expect(tables[0] == slurp(sample / "expected_report.txt"), "table report differs from checked-in golden");
  fs::remove_all(work);
  if (o.pass) o.detail = "two runs byte-identical and equal to samples/replay goldens";
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {"reward exactness", 1.0, reward_exactness},
      {"gap arithmetic oracle", 1.0, gap_oracle},
      {"advantage properties", 5.0, advantage_properties},
      {"synthesis discard rule", 30.0, synthesis_discard},
      {"simulator gradient check", 60.0, gradient_check},
      {"ablation ordering", 120.0, ablation_ordering},
      {"prompt fidelity", 0.0, prompt_fidelity},
      {"replay determinism", 0.0, replay_determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  if (only < 0 || only > 8) {
    std::fprintf(stderr, "criterion must be 1..8\n");
    return 2;
  }

  int failed = 0;
  for (int i = 0; i < 8; ++i) {
    if (only != 0 && only != i + 1) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (all[i].budget_s > 0 && secs > all[i].budget_s) {
      o.pass = false;
      o.detail += "; over time budget of " + fmt("%g", all[i].budget_s) + " s";
    }
    std::printf("%s  c%d %-26s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
