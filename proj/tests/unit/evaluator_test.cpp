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

#include "judgekit/evaluator.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <map>

#include "judgekit/rng.hpp"

namespace judgekit {
namespace {

namespace fs = std::filesystem;

// Answers each prompt via a callback.
class ScriptedSource : public CompletionSource {
 public:
  std::function<CompletionResult(const CompletionRequest&)> fn;
  std::size_t calls = 0;
  std::vector<CompletionResult> complete_all(const std::vector<CompletionRequest>& reqs) override {
    std::vector<CompletionResult> out;
    for (const auto& r : reqs) {
      ++calls;
      out.push_back(fn(r));
    }
    return out;
  }
};

CompletionResult text(const std::string& t) {
  CompletionResult r;
  r.text = t;
  return r;
}

PreferencePair pair(const std::string& id, Verdict label, const std::string& subset = "S") {
  PreferencePair p;
  p.id = id;
  p.query = "question " + id;
  p.response_a = "alpha " + id;
  p.response_b = "beta " + id;
  p.label = label;
  p.kind = TaskKind::objective;
  p.ground_truth = "7";
  p.subset = subset;
  return p;
}

// A judge that picks the slot containing the "alpha" response.
CompletionResult prefers_alpha(const CompletionRequest& r) {
  const auto a = r.prompt.find("[The Start of Chatbot A's Response]\nalpha");
  return text(a != std::string::npos ? "... [[A]]" : "... [[B]]");
}

TEST(Subsample, CapAndIdentity) {
  std::vector<int> items(600);
  for (int i = 0; i < 600; ++i) items[i] = i;
  EvalConfig cfg;
  cfg.seed = 5;
  const auto s = subsample(items, cfg);
  EXPECT_EQ(s.size(), 512u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(s, subsample(items, cfg));
  cfg.seed = 6;
  EXPECT_NE(s, subsample(items, cfg));
  std::vector<int> few(items.begin(), items.begin() + 300);
  EXPECT_EQ(subsample(few, cfg), few);
}

TEST(EvaluateJudging, AllCorrect) {
  ScriptedSource src;
  src.fn = prefers_alpha;
  std::vector<PreferencePair> bench;
  for (int i = 0; i < 10; ++i) bench.push_back(pair(std::to_string(i), Verdict::A));
  const auto r = evaluate_judging(src, bench, std::nullopt, EvalConfig{});
  EXPECT_EQ(r.accuracy(), 1.0);
  EXPECT_EQ(r.records.size(), 10u);
  EXPECT_EQ(r.n_failed, 0u);
}

TEST(EvaluateJudging, AbsentVerdictCountsAsWrong) {
  ScriptedSource src;
  src.fn = [](const CompletionRequest&) { return text("I cannot decide."); };
  const auto r = evaluate_judging(src, {pair("1", Verdict::A)}, std::nullopt, EvalConfig{});
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].judged, false);
  EXPECT_EQ(r.n_format_failures, 1u);
  EXPECT_EQ(r.accuracy(), 0.0);
}

TEST(EvaluateJudging, FailuresExcludedFromDenominator) {
  ScriptedSource src;
  src.fn = [](const CompletionRequest& r) {
    if (r.prompt.find("question 2") != std::string::npos) {
      CompletionResult f;
      f.error = "boom";
      f.infrastructure_failure = true;
      return f;
    }
    return prefers_alpha(r);
  };
  const auto r = evaluate_judging(src, {pair("1", Verdict::A), pair("2", Verdict::A), pair("3", Verdict::B)},
                                  std::nullopt, EvalConfig{});
  EXPECT_EQ(r.n_failed, 1u);
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_DOUBLE_EQ(r.accuracy(), 0.5);
}

TEST(EvaluateJudging, SwapPositionsNeedsBothOrders) {
  ScriptedSource src;
  src.fn = prefers_alpha;
  EvalConfig cfg;
  cfg.swap_positions = true;
  auto r = evaluate_judging(src, {pair("1", Verdict::A)}, std::nullopt, cfg);
  EXPECT_EQ(src.calls, 2u);
  EXPECT_EQ(r.records[0].judged, true);

  // Always answering A is right in one order only.
  ScriptedSource biased;
  biased.fn = [](const CompletionRequest&) { return text("[[A]]"); };
  r = evaluate_judging(biased, {pair("1", Verdict::A)}, std::nullopt, cfg);
  EXPECT_EQ(r.records[0].judged, false);
  r = evaluate_judging(biased, {pair("1", Verdict::A)}, std::nullopt, EvalConfig{});
  EXPECT_EQ(r.records[0].judged, true);
}

TEST(EvaluateJudging, PromptKindSelection) {
  ScriptedSource src;
  std::vector<std::string> prompts;
  src.fn = [&](const CompletionRequest& r) {
    prompts.push_back(r.prompt);
    return text("[[A]]");
  };
  PreferencePair subj = pair("s", Verdict::A);
  subj.kind = TaskKind::subjective;
  subj.ground_truth.reset();
  evaluate_judging(src, {pair("o", Verdict::A), subj}, std::nullopt, EvalConfig{});
  EXPECT_NE(prompts[0].find("\\boxed{}"), std::string::npos);
  EXPECT_NE(prompts[1].find("<solution>"), std::string::npos);

  const auto gt = evaluate_judging(src, {pair("o", Verdict::A)}, PromptKind::judge_with_gt, EvalConfig{});
  EXPECT_NE(prompts.back().find("[Reference Answer]\n7\n"), std::string::npos);
  EXPECT_EQ(gt.records[0].judged, std::nullopt);
  EXPECT_EQ(gt.records[0].judged_with_gt, true);
  EXPECT_THROW(evaluate_judging(src, {subj}, PromptKind::judge_with_gt, EvalConfig{}), InputError);
}

TEST(EvaluateSolving, Counting) {
  ScriptedSource src;
  src.fn = [](const CompletionRequest& r) {
    if (r.prompt.find("question 3") != std::string::npos) return text("it is \\boxed{8}");
    if (r.prompt.find("question 2") != std::string::npos) return text("seven, probably");
    return text("\\boxed{7}");
  };
  std::vector<PreferencePair> qs = {pair("0", Verdict::A), pair("1", Verdict::A), pair("2", Verdict::A),
                                    pair("3", Verdict::A)};
  qs[2].ground_truth = "seven";
  const auto r = evaluate_solving(src, qs, EvalConfig{});
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_EQ(r.records[0].solved, true);
  EXPECT_EQ(r.records[2].solved, false);  // unparseable: nothing boxed
  EXPECT_EQ(r.records[3].solved, false);
  EXPECT_EQ(r.n_format_failures, 1u);

  qs.pop_back();
  qs[2].ground_truth = "7";
  src.fn = [](const CompletionRequest& r) {
    return text(r.prompt.find("question 1") != std::string::npos ? "\\boxed{6}" : "\\boxed{7}");
  };
  qs.push_back(pair("9", Verdict::A));
  EXPECT_DOUBLE_EQ(evaluate_solving(src, qs, EvalConfig{}).accuracy(), 0.75);
}

JudgeRecord rec(const std::string& id, std::optional<bool> s, std::optional<bool> j,
                const std::string& subset = "S") {
  JudgeRecord r;
  r.query_id = id;
  r.solved = s;
  r.judged = j;
  r.subset = subset;
  return r;
}

TEST(GapReport, FourSolvedOneWrong) {
  const auto g = gap_report({rec("1", true, true), rec("2", true, true), rec("3", true, false),
                             rec("4", true, true), rec("5", false, false)});
  ASSERT_TRUE(g.gap.has_value());
  EXPECT_DOUBLE_EQ(*g.gap, 0.25);
  EXPECT_EQ(g.n_solved, 4u);
  EXPECT_EQ(g.n_total, 5u);
  EXPECT_DOUBLE_EQ(g.s_acc.value(), 0.8);
  EXPECT_DOUBLE_EQ(g.j_acc.value(), 0.6);
  EXPECT_FALSE(g.j_acc_gt.has_value());
}

TEST(GapReport, SubsetWithoutSolvingHasNoSAcc) {
  // "chat" has judging outcomes only; its S-Acc must not count as 0 in the
  // macro average.
  JudgeRecord c1{"c1", std::nullopt, true, std::nullopt, "chat"};
  JudgeRecord c2{"c2", std::nullopt, false, std::nullopt, "chat"};
  JudgeRecord m1{"m1", true, true, std::nullopt, "math"};
  JudgeRecord m2{"m2", false, true, std::nullopt, "math"};
  const auto reps = gap_reports_by_subset({c1, c2, m1, m2}, Averaging::macro);
  EXPECT_FALSE(reps.at("chat").s_acc.has_value());
  EXPECT_DOUBLE_EQ(reps.at("chat").j_acc.value(), 0.5);
  EXPECT_DOUBLE_EQ(reps.at(kAverageRow).s_acc.value(), 0.5);
  EXPECT_DOUBLE_EQ(reps.at(kAverageRow).j_acc.value(), 0.75);
}

TEST(GapReport, NoSolvedIsNull) {
  const auto g = gap_report({rec("1", false, true)});
  EXPECT_FALSE(g.gap.has_value());
  EXPECT_EQ(g.n_solved, 0u);
}

TEST(GapReport, ComplementAndUnsolvedInvariance) {
  Rng rng(3);
  std::vector<JudgeRecord> rs;
  for (int i = 0; i < 500; ++i) rs.push_back(rec(std::to_string(i), rng.bernoulli(0.6), rng.bernoulli(0.7)));
  const auto g = gap_report(rs);
  std::size_t solved = 0, good = 0;
  for (const auto& r : rs) {
    if (*r.solved) {
      ++solved;
      good += *r.judged;
    }
  }
  const double p_j1 = static_cast<double>(good) / static_cast<double>(solved);
  EXPECT_NEAR(*g.gap + p_j1, 1.0, 1e-12);
  for (int i = 0; i < 100; ++i) rs.push_back(rec("u" + std::to_string(i), false, rng.bernoulli(0.5)));
  EXPECT_EQ(*gap_report(rs).gap, *g.gap);
}

TEST(GapReport, DeltaAndWithGt) {
  GapReport base;
  base.gap = 0.4;
  auto r1 = rec("1", true, false);
  r1.judged_with_gt = true;
  const auto g = gap_report({r1, rec("2", true, true)}, base);
  EXPECT_NEAR(*g.delta_vs_base, 0.1, 1e-12);
  EXPECT_EQ(g.j_acc_gt, 1.0);
}

TEST(GapReportsBySubset, MacroAndMicro) {
  std::vector<JudgeRecord> rs;
  // Subset X: 2 solved, 1 misjudged. Subset Y: 4 solved, 0 misjudged.
  rs.push_back(rec("x1", true, false, "X"));
  rs.push_back(rec("x2", true, true, "X"));
  for (int i = 0; i < 4; ++i) rs.push_back(rec("y" + std::to_string(i), true, true, "Y"));
  const auto macro = gap_reports_by_subset(rs, Averaging::macro);
  EXPECT_DOUBLE_EQ(*macro.at("X").gap, 0.5);
  EXPECT_DOUBLE_EQ(*macro.at("Y").gap, 0.0);
  EXPECT_DOUBLE_EQ(*macro.at(kAverageRow).gap, 0.25);
  const auto micro = gap_reports_by_subset(rs, Averaging::micro);
  EXPECT_DOUBLE_EQ(*micro.at(kAverageRow).gap, 1.0 / 6.0);
}

TEST(JoinRecords, MergesAndDetectsConflicts) {
  JudgeRecord s = rec("1", true, std::nullopt);
  JudgeRecord j = rec("1", std::nullopt, false);
  JudgeRecord other = rec("2", std::nullopt, true);
  const auto joined = join_records({{s}, {j, other}});
  ASSERT_EQ(joined.size(), 2u);
  EXPECT_EQ(joined[0].solved, true);
  EXPECT_EQ(joined[0].judged, false);
  JudgeRecord clash = rec("1", false, std::nullopt);
  EXPECT_THROW(join_records({{s}, {clash}}), InputError);
}

TEST(RenderReport, OneSubsetTable) {
  std::map<std::string, GapReport> m;
  GapReport g;
  g.s_acc = 0.5;
  g.j_acc = 0.25;
  g.gap = 0.373;
  g.n_solved = 10;
  g.n_total = 20;
  m["MATH"] = g;
  const auto t = render_report(m, ReportFormat::table);
  // header, rule, one row
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 3);
  EXPECT_NE(t.find("37.3"), std::string::npos);
  EXPECT_NE(t.find("—"), std::string::npos);  // j_acc_gt and delta are null
  const auto head = t.substr(0, t.find('\n'));
  EXPECT_LT(head.find("S-Acc"), head.find("J-Acc "));
  EXPECT_LT(head.find("J-Acc w/ GT"), head.find("P(j=0|s=1)"));
  EXPECT_LT(head.find("P(j=0|s=1)"), head.find("Δ"));
}

TEST(RenderReport, SignedDelta) {
  std::map<std::string, GapReport> m;
  GapReport g;
  g.gap = 0.2;
  g.delta_vs_base = -0.162;
  m["A"] = g;
  EXPECT_NE(render_report(m, ReportFormat::csv).find(",-16.2,"), std::string::npos);
  m["A"].delta_vs_base = 0.05;
  EXPECT_NE(render_report(m, ReportFormat::csv).find(",+5.0,"), std::string::npos);
}

TEST(RenderReport, CsvAndJsonAgree) {
  std::vector<JudgeRecord> rs;
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    auto r = rec(std::to_string(i), rng.bernoulli(0.7), rng.bernoulli(0.6), i % 3 ? "B" : "A");
    if (i % 2) r.judged_with_gt = rng.bernoulli(0.8);
    rs.push_back(r);
  }
  const auto reports = gap_reports_by_subset(rs);
  const auto csv = render_report(reports, ReportFormat::csv);
  const auto js = json::parse(render_report(reports, ReportFormat::json));
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), js["rows"].size() + 1);
  const char* keys[] = {"s_acc", "j_acc", "j_acc_gt", "gap"};
  for (std::size_t r = 0; r < js["rows"].size(); ++r) {
    const auto& jr = js["rows"][r];
    EXPECT_EQ(rows[r + 1][0], jr["subset"]);
    for (int k = 0; k < 4; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f", jr[keys[k]].get<double>() * 100.0);
      EXPECT_EQ(rows[r + 1][k + 1], buf) << keys[k];
    }
    EXPECT_EQ(rows[r + 1][6], std::to_string(jr["n_solved"].get<std::size_t>()));
  }
}

TEST(Records, RoundTrip) {
  const auto path = (fs::temp_directory_path() / "judgekit_records.jsonl").string();
  auto r = rec("1", true, std::nullopt);
  r.judged_with_gt = false;
  write_records(path, {r, rec("2", std::nullopt, true, "")});
  const auto back = read_records(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], r);
  EXPECT_EQ(back[1], rec("2", std::nullopt, true, ""));
}

}  // namespace
}  // namespace judgekit
