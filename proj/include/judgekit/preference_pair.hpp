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

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "judgekit/errors.hpp"
#include "judgekit/trajectory.hpp"

namespace judgekit {

enum class Source { math_dpo, webinstruct_synth, helpsteer3, custom };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::math_dpo: return "math_dpo";
    case Source::webinstruct_synth: return "webinstruct_synth";
    case Source::helpsteer3: return "helpsteer3";
    case Source::custom: return "custom";
  }
  return "custom";
}

inline Source parse_source(std::string_view s) {
  if (s == "math_dpo") return Source::math_dpo;
  if (s == "webinstruct_synth") return Source::webinstruct_synth;
  if (s == "helpsteer3") return Source::helpsteer3;
  if (s == "custom") return Source::custom;
  throw InputError("unknown source '" + std::string(s) + "'");
}

// One pairwise instance: a query, two candidate responses and the label
// naming the preferred one.
struct PreferencePair {
  std::string id;
  std::string query;
  std::string response_a;
  std::string response_b;
  Verdict label = Verdict::A;
  TaskKind kind = TaskKind::objective;
  std::optional<std::string> ground_truth;
  Source source = Source::custom;
  // Benchmark subset (e.g. "MATH"); empty for training data.
  std::string subset;

  const std::string& preferred() const { return label == Verdict::A ? response_a : response_b; }
  const std::string& rejected() const { return label == Verdict::A ? response_b : response_a; }

  bool operator==(const PreferencePair&) const = default;
};

// Throws InputError describing the first violated invariant.
inline void validate(const PreferencePair& p) {
  if (p.kind == TaskKind::objective && (!p.ground_truth || p.ground_truth->empty())) {
    throw InputError("pair '" + p.id + "': objective task without ground truth");
  }
  if (p.kind == TaskKind::subjective && p.ground_truth) {
    throw InputError("pair '" + p.id + "': subjective task carries a ground truth");
  }
  if (p.response_a == p.response_b) {
    throw InputError("pair '" + p.id + "': response_a equals response_b");
  }
}

}  // namespace judgekit
