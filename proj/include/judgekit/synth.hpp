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

// Preference-pair synthesis from verifiable QA, source mixing, and
// ingestion of external pair corpora.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/preference_pair.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/trajectory.hpp"
#include "judgekit/verifier.hpp"

namespace judgekit {

enum class PairStrategy { first_valid, random_valid };

inline PairStrategy parse_pair_strategy(std::string_view s) {
  if (s == "first_valid") return PairStrategy::first_valid;
  if (s == "random_valid") return PairStrategy::random_valid;
  throw InputError("unknown pair strategy '" + std::string(s) + "'");
}

inline std::string_view to_string(PairStrategy s) {
  return s == PairStrategy::first_valid ? "first_valid" : "random_valid";
}

struct SynthConfig {
  std::vector<std::string> generators;
  int samples_per_query = 8;
  PairStrategy pair_strategy = PairStrategy::first_valid;
  bool position_balance = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (samples_per_query < 2) throw ConfigError("synth.samples_per_query must be >= 2");
  }
};

// The answer a generator response commits to: its first \boxed{} content,
// or the whole response when nothing is boxed.
inline std::string response_answer(std::string_view response) {
  if (auto boxed = extract_boxed(response)) return *boxed;
  return std::string(response);
}

// One pair per query: a verified-correct response is preferred over a
// verified-incorrect one. Queries without both kinds yield nothing.
inline std::vector<PreferencePair> synthesize_pairs(std::string_view query, std::string_view truth,
                                                    const std::vector<std::string>& responses,
                                                    const SynthConfig& cfg) {
  if (truth.empty()) throw ConfigError("synthesize_pairs: empty ground truth");
  if (responses.empty()) throw InputError("synthesize_pairs: no responses");

  std::vector<const std::string*> correct;
  std::vector<const std::string*> incorrect;
  for (const auto& r : responses) {
    (verify(std::string_view(response_answer(r)), truth) == 1 ? correct : incorrect).push_back(&r);
  }
  if (correct.empty() || incorrect.empty()) return {};

  const std::uint64_t qhash = fnv1a64(query);
  Rng rng(mix_seed(cfg.seed, qhash));
  const std::string* good = correct.front();
  const std::string* bad = incorrect.front();
  if (cfg.pair_strategy == PairStrategy::random_valid) {
    good = correct[rng.below(correct.size())];
    bad = incorrect[rng.below(incorrect.size())];
  }
  const bool preferred_in_a = cfg.position_balance ? rng.bernoulli(0.5) : true;

  PreferencePair p;
  p.id = "synth-" + hex64(qhash);
  p.query = std::string(query);
  p.response_a = preferred_in_a ? *good : *bad;
  p.response_b = preferred_in_a ? *bad : *good;
  p.label = preferred_in_a ? Verdict::A : Verdict::B;
  p.kind = TaskKind::objective;
  p.ground_truth = std::string(truth);
  p.source = Source::webinstruct_synth;
  return {std::move(p)};
}

struct SourceQuota {
  Source source = Source::custom;
  std::vector<PreferencePair> pairs;
  std::size_t quota = 0;
};

// Seeded uniform sample of `quota` pairs from each source, concatenated
// and shuffled.
inline std::vector<PreferencePair> mix_dataset(const std::vector<SourceQuota>& sources,
                                               std::uint64_t seed) {
  for (const auto& s : sources) {
    if (s.quota > s.pairs.size()) {
      throw InputError("mix_dataset: source '" + std::string(to_string(s.source)) + "' has " +
                       std::to_string(s.pairs.size()) + " pairs, quota is " +
                       std::to_string(s.quota));
    }
  }
  Rng rng(seed);
  std::vector<PreferencePair> out;
  for (const auto& s : sources) {
    for (std::size_t i : rng.sample_indices(s.pairs.size(), s.quota)) out.push_back(s.pairs[i]);
  }
  rng.shuffle(out);
  return out;
}

struct IngestResult {
  std::vector<PreferencePair> pairs;
  std::vector<std::string> diagnostics;
  std::size_t n_invalid = 0;
  std::size_t n_records = 0;
};

namespace detail {

inline std::string context_text(const json& ctx) {
  if (ctx.is_string()) return ctx.get<std::string>();
  if (!ctx.is_array() || ctx.empty()) throw FormatError("'context' must be a string or messages");
  // Multi-turn contexts are out of scope; keep the last user turn.
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
    if (it->is_object() && it->value("role", "") == "user") {
      return require_string(*it, "content");
    }
  }
  throw FormatError("'context' has no user turn");
}

// Accepts pair.v1 records, prompt/chosen/rejected records (Math-DPO style)
// and context/response1/response2/overall_preference records
// (HelpSteer3 style).
inline PreferencePair external_record(const json& j, Source source, std::size_t line_no) {
  if (!j.is_object()) throw FormatError("record is not an object");
  if (j.contains("response_a")) {
    PreferencePair p = pair_from_json(j);
    if (!j.contains("source")) p.source = source;
    return p;
  }

  PreferencePair p;
  p.source = source;
  p.id = j.contains("id") && j["id"].is_string()
             ? j["id"].get<std::string>()
             : std::string(to_string(source)) + "-" + std::to_string(line_no);

  if (j.contains("chosen")) {
    p.query = require_string(j, "prompt");
    const std::string chosen = require_string(j, "chosen");
    const std::string rejected = require_string(j, "rejected");
    // Slot assignment by query hash keeps positions balanced and replayable.
    const bool chosen_in_a = (fnv1a64(p.query) & 1U) == 0;
    p.response_a = chosen_in_a ? chosen : rejected;
    p.response_b = chosen_in_a ? rejected : chosen;
    p.label = chosen_in_a ? Verdict::A : Verdict::B;
    if (j.contains("answer") && j["answer"].is_string() && !j["answer"].get<std::string>().empty()) {
      p.kind = TaskKind::objective;
      p.ground_truth = j["answer"].get<std::string>();
    } else {
      p.kind = TaskKind::subjective;
    }
  } else if (j.contains("response1")) {
    if (!j.contains("context")) throw FormatError("missing field 'context'");
    p.query = context_text(j["context"]);
    p.response_a = require_string(j, "response1");
    p.response_b = require_string(j, "response2");
    if (!j.contains("overall_preference") || !j["overall_preference"].is_number()) {
      throw FormatError("missing numeric 'overall_preference'");
    }
    const double pref = j["overall_preference"].get<double>();
    if (pref == 0.0) throw FormatError("tied preference");
    p.label = pref < 0.0 ? Verdict::A : Verdict::B;
    p.kind = TaskKind::subjective;
  } else {
    throw FormatError("unrecognized record layout");
  }
  try {
    validate(p);
  } catch (const InputError& e) {
    throw FormatError(e.what());
  }
  return p;
}

}  // namespace detail

// Invalid lines are skipped with a diagnostic; a file where more than half
// the records are invalid is rejected.
inline IngestResult ingest_external(const std::string& path, Source source) {
  IngestResult out;
  const auto lines = read_lines(path);
  if (lines.empty()) {
    out.diagnostics.push_back("warning: " + path + " is empty");
    return out;
  }
  for (const auto& line : lines) {
    json j;
    try {
      j = json::parse(line.text);
    } catch (const json::parse_error&) {
      ++out.n_records;
      ++out.n_invalid;
      out.diagnostics.push_back(path + ":" + std::to_string(line.line_no) + ": not valid JSON");
      continue;
    }
    if (is_header(j)) {
      check_header(j, kPairFamily);
      continue;
    }
    ++out.n_records;
    try {
      out.pairs.push_back(detail::external_record(j, source, line.line_no));
    } catch (const FormatError& e) {
      ++out.n_invalid;
      out.diagnostics.push_back(path + ":" + std::to_string(line.line_no) + ": " + e.what());
    }
  }
  if (out.n_records > 0 && 2 * out.n_invalid > out.n_records) {
    throw FormatError(path + ": " + std::to_string(out.n_invalid) + " of " +
                      std::to_string(out.n_records) + " records are invalid");
  }
  return out;
}

}  // namespace judgekit
