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

// Writes the replay sample under samples/replay/: a small pair.v1 benchmark
// and a completions.v1 cache answering every prompt that
// `judgekit evaluate --with-gt` sends for it. Outcomes are planted per item
// so the resulting report is known in advance:
//   objective item i (30 per subset): solved unless i % 10 == 9
//     math:  judged wrong when i % 3 == 0
//     logic: judged wrong when i % 2 == 0
//     with the ground truth shown: judged wrong when i % 6 == 0
//   chat (subjective, 20 items): judged wrong when i % 4 == 0
//
// Usage: make_replay_sample OUT_DIR

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "judgekit/completion_source.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/prompts.hpp"

using namespace judgekit;

namespace {

std::string verdict_text(const std::string& preamble, Verdict v) {
  return preamble + "\nAfter comparing both responses, my final verdict is: [[" +
         std::string(to_string(v)) + "]]";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_replay_sample OUT_DIR\n";
    return 2;
  }
  const std::string dir = argv[1];
  std::vector<PreferencePair> bench;
  CompletionCache cache;

  for (const std::string subset : {"math", "logic"}) {
    for (int i = 0; i < 30; ++i) {
      const int a = 3 * i + (subset == "math" ? 7 : 11);
      const int b = i + 2;
      PreferencePair p;
      p.id = subset + "-" + std::to_string(i);
      p.query = "[" + p.id + "] Compute " + std::to_string(a) + " * " + std::to_string(b) + ".";
      const std::string right = std::to_string(a * b);
      const std::string wrong = std::to_string(a * b + 1 + i % 4);
      const std::string good = "We multiply directly: " + std::to_string(a) + " * " +
                               std::to_string(b) + " = \\boxed{" + right + "}.";
      const std::string bad = "Roughly " + std::to_string(a) + " times " + std::to_string(b) +
                              " is \\boxed{" + wrong + "}.";
      // Alternate which slot holds the correct response.
      p.label = i % 2 ? Verdict::B : Verdict::A;
      p.response_a = p.label == Verdict::A ? good : bad;
      p.response_b = p.label == Verdict::A ? bad : good;
      p.kind = TaskKind::objective;
      p.ground_truth = right;
      p.subset = subset;
      bench.push_back(p);

      const bool solved = i % 10 != 9;
      const bool judged = subset == "math" ? i % 3 != 0 : i % 2 != 0;
      const bool judged_gt = i % 6 != 0;
      const std::string own = "\\boxed{" + (solved ? right : wrong) + "}";
      const Verdict pick = judged ? p.label : other(p.label);
      const Verdict pick_gt = judged_gt ? p.label : other(p.label);

      cache.put({render_prompt(PromptKind::s2j_objective, p.query, p.response_a, p.response_b), 0},
                verdict_text("My own solution: " + own + ".", pick));
      cache.put({render_prompt(PromptKind::solve_only, p.query), 0},
                "Multiplying step by step gives " + own + ".");
      cache.put({render_prompt(PromptKind::judge_with_gt, p.query, p.response_a, p.response_b,
                               *p.ground_truth),
                 0},
                verdict_text("Checking each response against the reference answer.", pick_gt));
    }
  }

  for (int i = 0; i < 20; ++i) {
    PreferencePair p;
    p.id = "chat-" + std::to_string(i);
    p.query = "[" + p.id + "] Suggest a name for a bakery on street number " + std::to_string(i) + ".";
    p.label = i % 3 ? Verdict::A : Verdict::B;
    const std::string good = "\"Crumb & Co. No. " + std::to_string(i) + "\", short and warm.";
    const std::string bad = "Bakery.";
    p.response_a = p.label == Verdict::A ? good : bad;
    p.response_b = p.label == Verdict::A ? bad : good;
    p.kind = TaskKind::subjective;
    p.subset = "chat";
    bench.push_back(p);

    const Verdict pick = i % 4 != 0 ? p.label : other(p.label);
    cache.put({render_prompt(PromptKind::s2j_subjective, p.query, p.response_a, p.response_b), 0},
              verdict_text("<solution>\"Flour Hour " + std::to_string(i) + "\"</solution>", pick));
  }

  write_pairs(dir + "/bench.jsonl", bench);
  cache.save(dir + "/completions.jsonl");
  std::printf("%zu pairs, %zu cached completions\n", bench.size(), cache.size());
  return 0;
}
