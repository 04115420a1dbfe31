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

// Decomposition of a judge model's output into (self-solution, reasoning,
// verdict).

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "judgekit/errors.hpp"

namespace judgekit {

enum class TaskKind { objective, subjective };

enum class Verdict { A, B };

inline std::string_view to_string(TaskKind k) {
  return k == TaskKind::objective ? "objective" : "subjective";
}

inline std::string_view to_string(Verdict v) { return v == Verdict::A ? "A" : "B"; }

inline TaskKind parse_task_kind(std::string_view s) {
  if (s == "objective") return TaskKind::objective;
  if (s == "subjective") return TaskKind::subjective;
  throw InputError("unknown task kind '" + std::string(s) + "'");
}

inline Verdict parse_verdict(std::string_view s) {
  if (s == "A") return Verdict::A;
  if (s == "B") return Verdict::B;
  throw InputError("verdict must be A or B, got '" + std::string(s) + "'");
}

constexpr Verdict other(Verdict v) { return v == Verdict::A ? Verdict::B : Verdict::A; }

struct Trajectory {
  std::string raw_text;
  std::optional<std::string> self_solution;
  std::string reasoning;
  std::optional<Verdict> verdict;

  bool operator==(const Trajectory&) const = default;
};

// Content of the first balanced \boxed{...} group. An opener whose braces
// never close is skipped.
inline std::optional<std::string> extract_boxed(std::string_view text) {
  static constexpr std::string_view kOpen = "\\boxed{";
  std::size_t from = 0;
  while (true) {
    const std::size_t at = text.find(kOpen, from);
    if (at == std::string_view::npos) return std::nullopt;
    const std::size_t body = at + kOpen.size();
    int depth = 1;
    for (std::size_t i = body; i < text.size(); ++i) {
      if (text[i] == '{') {
        ++depth;
      } else if (text[i] == '}' && --depth == 0) {
        return std::string(text.substr(body, i - body));
      }
    }
    from = body;
  }
}

inline std::optional<std::string> extract_solution_tags(std::string_view text) {
  static constexpr std::string_view kOpen = "<solution>";
  static constexpr std::string_view kClose = "</solution>";
  const std::size_t open = text.find(kOpen);
  if (open == std::string_view::npos) return std::nullopt;
  const std::size_t body = open + kOpen.size();
  const std::size_t close = text.find(kClose, body);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(body, close - body));
}

// The last literal [[A]] / [[B]] wins.
inline std::optional<Verdict> extract_verdict(std::string_view text) {
  const std::size_t a = text.rfind("[[A]]");
  const std::size_t b = text.rfind("[[B]]");
  if (a == std::string_view::npos && b == std::string_view::npos) return std::nullopt;
  if (a == std::string_view::npos) return Verdict::B;
  if (b == std::string_view::npos) return Verdict::A;
  return a > b ? Verdict::A : Verdict::B;
}

inline Trajectory parse_trajectory(std::string_view text, TaskKind kind) {
  Trajectory t;
  t.raw_text = std::string(text);
  t.self_solution = kind == TaskKind::objective ? extract_boxed(text)
                                                : extract_solution_tags(text);
  t.reasoning = t.raw_text;
  t.verdict = extract_verdict(text);
  return t;
}

}  // namespace judgekit
