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

// Prompt templates. The judging templates are fixed byte-for-byte; any edit
// breaks the golden and checksum tests on purpose.
//
// solve_only and judge_with_gt are this toolkit's own templates (used to
// measure solving accuracy and judging accuracy with the reference answer
// in the prompt); reports that use them should say so.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "judgekit/errors.hpp"

namespace judgekit {

enum class PromptKind {
  s2j_objective,
  s2j_subjective,
  baseline_instruct,
  baseline_reasoner,
  solve_only,
  judge_with_gt,
};

inline std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::s2j_objective: return "s2j_objective";
    case PromptKind::s2j_subjective: return "s2j_subjective";
    case PromptKind::baseline_instruct: return "baseline_instruct";
    case PromptKind::baseline_reasoner: return "baseline_reasoner";
    case PromptKind::solve_only: return "solve_only";
    case PromptKind::judge_with_gt: return "judge_with_gt";
  }
  return "s2j_objective";
}

inline PromptKind parse_prompt_kind(std::string_view s) {
  for (PromptKind k : {PromptKind::s2j_objective, PromptKind::s2j_subjective,
                       PromptKind::baseline_instruct, PromptKind::baseline_reasoner,
                       PromptKind::solve_only, PromptKind::judge_with_gt}) {
    if (to_string(k) == s) return k;
  }
  throw InputError("unknown prompt kind '" + std::string(s) + "'");
}

namespace templates {

inline constexpr std::string_view kS2jObjective =
    R"PROMPT(Please act as an impartial judge and evaluate the quality of the responses provided by two AI Chatbots to the Client's question displayed below.

1. First, you MUST solve the Client's question yourself and put your final answer within \boxed{}. Provide your own solution before proceeding to the evaluation.

2. Evaluate the two Chatbot responses based on correctness, referencing your own solution.
3. Output your final verdict by strictly following this format:
'[[A]]' if Chatbot A is better, or '[[B]]' if Chatbot B is better.

[Client Question]
{question}

[The Start of Chatbot A's Response]
{answer_a}
[The End of Chatbot A's Response]

[The Start of Chatbot B's Response]
{answer_b}
[The End of Chatbot B's Response])PROMPT";

inline constexpr std::string_view kS2jSubjective =
    R"PROMPT(Please act as an impartial judge and evaluate the quality of the responses provided by two AI Chatbots to the Client's question displayed below.

1. First, you MUST solve the Client's question yourself and put your entire solution within <solution> and </solution> tags. Provide your own solution before proceeding to the evaluation.

2. Evaluate the two Chatbot responses based on correctness, referencing your own solution.
3. Output your final verdict by strictly following this format:
'[[A]]' if Chatbot A is better, or '[[B]]' if Chatbot B is better.

[Client Question]
{question}

[The Start of Chatbot A's Response]
{answer_a}
[The End of Chatbot A's Response]

[The Start of Chatbot B's Response]
{answer_b}
[The End of Chatbot B's Response])PROMPT";

inline constexpr std::string_view kBaselineInstruct =
    R"PROMPT(Please act as an impartial judge and evaluate the quality of the responses provided by two AI assistants to the user question displayed below.

You should choose the assistant that follows the user's instructions and answers the user's question better.
Your evaluation should consider factors such as the helpfulness, relevance, accuracy, depth, creativity, and level of detail of their responses.
Begin your evaluation by comparing the two responses and provide a short explanation.
Avoid any position biases and ensure that the order in which the responses were presented does not influence your decision.
Do not allow the length of the responses to influence your evaluation.
Do not favor certain names of the assistants.
Be as objective as possible.

After providing your explanation, output your final verdict by strictly following this format: "[[A]]" if assistant A is better, "[[B]]" if assistant B is better.

[Client Question]
{question}

[The Start of Chatbot A's Response]
{answer_a}
[The End of Chatbot A's Response]

[The Start of Chatbot B's Response]
{answer_b}
[The End of Chatbot B's Response])PROMPT";

inline constexpr std::string_view kBaselineReasoner =
    R"PROMPT(Please act as an impartial judge and evaluate the quality of the responses provided by two AI Chatbots to the Client question displayed below.

[Client Question]
{question}

[The Start of Chatbot A's Response]
{answer_a}
[The End of Chatbot A's Response]

[The Start of Chatbot B's Response]
{answer_b}
[The End of Chatbot B's Response]

Output your final verdict at last by strictly following this format: '[[A]]' if Chatbot A is better, or '[[B]]' if Chatbot B is better.)PROMPT";

inline constexpr std::string_view kSolveOnly =
    R"PROMPT(Please solve the following question. Reason step by step, and put your final answer within \boxed{}.

[Question]
{question})PROMPT";

inline constexpr std::string_view kJudgeWithGt =
    R"PROMPT(Please act as an impartial judge and evaluate the quality of the responses provided by two AI Chatbots to the Client's question displayed below.

The correct final answer to the Client's question is given as the Reference Answer. Evaluate the two Chatbot responses based on correctness, referencing the Reference Answer.
Output your final verdict by strictly following this format:
'[[A]]' if Chatbot A is better, or '[[B]]' if Chatbot B is better.

[Client Question]
{question}

[Reference Answer]
{ground_truth}

[The Start of Chatbot A's Response]
{answer_a}
[The End of Chatbot A's Response]

[The Start of Chatbot B's Response]
{answer_b}
[The End of Chatbot B's Response])PROMPT";

}  // namespace templates

inline std::string_view template_for(PromptKind kind) {
  switch (kind) {
    case PromptKind::s2j_objective: return templates::kS2jObjective;
    case PromptKind::s2j_subjective: return templates::kS2jSubjective;
    case PromptKind::baseline_instruct: return templates::kBaselineInstruct;
    case PromptKind::baseline_reasoner: return templates::kBaselineReasoner;
    case PromptKind::solve_only: return templates::kSolveOnly;
    case PromptKind::judge_with_gt: return templates::kJudgeWithGt;
  }
  return templates::kS2jObjective;
}

inline constexpr bool is_judging(PromptKind kind) { return kind != PromptKind::solve_only; }

// Single-pass placeholder substitution: text inserted for one placeholder
// is never rescanned, so inputs containing "{answer_a}" stay literal.
inline std::string render_prompt(PromptKind kind, std::string_view query,
                                 std::optional<std::string_view> a = std::nullopt,
                                 std::optional<std::string_view> b = std::nullopt,
                                 std::optional<std::string_view> gt = std::nullopt) {
  if (is_judging(kind) && (!a || !b)) {
    throw InputError("render_prompt: " + std::string(to_string(kind)) + " needs both responses");
  }
  if (kind == PromptKind::judge_with_gt && !gt) {
    throw InputError("render_prompt: judge_with_gt needs a ground truth");
  }
  const std::string_view tpl = template_for(kind);
  struct Slot {
    std::string_view name;
    std::optional<std::string_view> value;
  };
  const Slot slots[] = {{"{question}", query}, {"{answer_a}", a}, {"{answer_b}", b},
                        {"{ground_truth}", gt}};

  std::string out;
  out.reserve(tpl.size() + query.size() + (a ? a->size() : 0) + (b ? b->size() : 0));
  std::size_t i = 0;
  while (i < tpl.size()) {
    bool matched = false;
    if (tpl[i] == '{') {
      for (const Slot& s : slots) {
        if (tpl.substr(i, s.name.size()) == s.name) {
          if (!s.value) throw InputError("render_prompt: no value for " + std::string(s.name));
          out.append(*s.value);
          i += s.name.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(tpl[i++]);
  }
  return out;
}

}  // namespace judgekit
