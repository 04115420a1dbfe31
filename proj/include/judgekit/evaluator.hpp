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

// Judging and solving evaluations, per-query record joining, and the
// solve-to-judge gap P(j=0|s=1).

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "judgekit/completion_source.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/preference_pair.hpp"
#include "judgekit/prompts.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/trajectory.hpp"
#include "judgekit/verifier.hpp"

namespace judgekit {

struct JudgeRecord {
  std::string query_id;
  std::optional<bool> solved;
  std::optional<bool> judged;
  std::optional<bool> judged_with_gt;
  std::string subset;

  bool operator==(const JudgeRecord&) const = default;
};

struct EvalConfig {
  int subsample_cap = 512;
  std::uint64_t seed = 0;
  bool swap_positions = false;
  // Above this fraction of format failures (no verdict / no answer) the
  // CLI exits 1; above it for infrastructure failures, 3.
  double max_failure_rate = 0.5;

  void validate() const {
    if (subsample_cap < 1) throw ConfigError("eval.subsample_cap must be >= 1");
    if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0)) {
      throw ConfigError("eval.max_failure_rate must be in [0, 1]");
    }
  }
};

// Seeded sample of exactly `cap` items, kept in input order.
template <typename T>
std::vector<T> subsample(const std::vector<T>& items, const EvalConfig& cfg) {
  const auto cap = static_cast<std::size_t>(cfg.subsample_cap);
  if (items.size() <= cap) return items;
  Rng rng(cfg.seed);
  auto idx = rng.sample_indices(items.size(), cap);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(cap);
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

struct EvalResult {
  // Only items that were actually evaluated.
  std::vector<JudgeRecord> records;
  std::size_t n_items = 0;
  std::size_t n_failed = 0;          // infrastructure; excluded from denominators
  std::size_t n_format_failures = 0; // no verdict / no boxed answer; counted as wrong
  std::vector<std::string> failures;

  double accuracy() const {
    std::size_t n = 0;
    std::size_t good = 0;
    for (const auto& r : records) {
      const auto& v = r.judged ? r.judged : (r.judged_with_gt ? r.judged_with_gt : r.solved);
      if (!v) continue;
      ++n;
      good += *v ? 1 : 0;
    }
    return n == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(n);
  }
};

// The judging prompt an s2j evaluation uses for a pair of the given kind.
inline PromptKind s2j_prompt_for(TaskKind k) {
  return k == TaskKind::objective ? PromptKind::s2j_objective : PromptKind::s2j_subjective;
}

// `kind` nullopt selects the s2j template matching each pair's task kind.
// judge_with_gt fills judged_with_gt instead of judged.
inline EvalResult evaluate_judging(CompletionSource& source,
                                   const std::vector<PreferencePair>& benchmark,
                                   std::optional<PromptKind> kind, const EvalConfig& cfg) {
  if (kind && !is_judging(*kind)) throw InputError("evaluate_judging: not a judging prompt kind");
  const int passes = cfg.swap_positions ? 2 : 1;
  std::vector<CompletionRequest> reqs;
  reqs.reserve(benchmark.size() * passes);
  for (const auto& p : benchmark) {
    const PromptKind k = kind.value_or(s2j_prompt_for(p.kind));
    std::optional<std::string_view> gt;
    if (k == PromptKind::judge_with_gt) {
      if (!p.ground_truth) throw InputError("pair '" + p.id + "': judge_with_gt needs a ground truth");
      gt = *p.ground_truth;
    }
    reqs.push_back({render_prompt(k, p.query, p.response_a, p.response_b, gt), 0});
    if (passes == 2) reqs.push_back({render_prompt(k, p.query, p.response_b, p.response_a, gt), 0});
  }
  const auto results = source.complete_all(reqs);

  EvalResult out;
  out.n_items = benchmark.size();
  for (std::size_t i = 0; i < benchmark.size(); ++i) {
    const auto& p = benchmark[i];
    bool failed = false;
    bool correct = true;
    for (int pass = 0; pass < passes; ++pass) {
      const auto& res = results[i * passes + pass];
      if (!res.ok()) {
        failed = true;
        out.failures.push_back(p.id + ": " + res.error);
        break;
      }
      const auto verdict = extract_verdict(*res.text);
      if (!verdict) ++out.n_format_failures;
      // The swapped pass shows the label's response in the other slot.
      const Verdict expect = pass == 0 ? p.label : other(p.label);
      correct = correct && verdict && *verdict == expect;
    }
    if (failed) {
      ++out.n_failed;
      continue;
    }
    JudgeRecord r;
    r.query_id = p.id;
    r.subset = p.subset;
    if (kind == PromptKind::judge_with_gt) {
      r.judged_with_gt = correct;
    } else {
      r.judged = correct;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

// Solve-only prompt per pair; solved = verify(first boxed answer, truth).
inline EvalResult evaluate_solving(CompletionSource& source,
                                   const std::vector<PreferencePair>& queries,
                                   const EvalConfig& /*cfg*/) {
  std::vector<CompletionRequest> reqs;
  reqs.reserve(queries.size());
  for (const auto& q : queries) {
    if (!q.ground_truth || q.ground_truth->empty()) {
      throw InputError("query '" + q.id + "': solving evaluation needs a ground truth");
    }
    reqs.push_back({render_prompt(PromptKind::solve_only, q.query), 0});
  }
  const auto results = source.complete_all(reqs);

  EvalResult out;
  out.n_items = queries.size();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    if (!results[i].ok()) {
      ++out.n_failed;
      out.failures.push_back(q.id + ": " + results[i].error);
      continue;
    }
    const auto answer = extract_boxed(*results[i].text);
    if (!answer) ++out.n_format_failures;
    JudgeRecord r;
    r.query_id = q.id;
    r.subset = q.subset;
    r.solved = verify(answer ? std::optional<std::string_view>(*answer) : std::nullopt,
                      *q.ground_truth) == 1;
    out.records.push_back(std::move(r));
  }
  return out;
}

// Merges record lists on query_id. Later lists fill fields the earlier ones
// left empty; two lists setting the same field for one query is an error.
// Output order is first appearance.
inline std::vector<JudgeRecord> join_records(const std::vector<std::vector<JudgeRecord>>& lists) {
  std::vector<JudgeRecord> out;
  std::map<std::string, std::size_t> where;
  auto merge = [](std::optional<bool>& into, const std::optional<bool>& from, const std::string& id,
                  const char* field) {
    if (!from) return;
    if (into && *into != *from) {
      throw InputError("record '" + id + "': conflicting values for " + field);
    }
    into = from;
  };
  for (const auto& list : lists) {
    for (const auto& r : list) {
      auto [it, fresh] = where.try_emplace(r.query_id, out.size());
      if (fresh) {
        out.push_back(r);
        continue;
      }
      JudgeRecord& into = out[it->second];
      if (into.subset.empty()) into.subset = r.subset;
      if (!r.subset.empty() && into.subset != r.subset) {
        throw InputError("record '" + r.query_id + "': conflicting subsets");
      }
      merge(into.solved, r.solved, r.query_id, "solved");
      merge(into.judged, r.judged, r.query_id, "judged");
      merge(into.judged_with_gt, r.judged_with_gt, r.query_id, "judged_with_gt");
    }
  }
  return out;
}

struct GapReport {
  // Each rate is absent when no record carries that outcome.
  std::optional<double> s_acc;
  std::optional<double> j_acc;
  std::optional<double> j_acc_gt;
  // P(j=0|s=1); absent when nothing was solved.
  std::optional<double> gap;
  std::size_t n_solved = 0;
  std::size_t n_total = 0;
  std::optional<double> delta_vs_base;

  bool operator==(const GapReport&) const = default;
};

namespace detail {

struct Tally {
  std::size_t n = 0;
  std::size_t k = 0;
  void add(bool b) {
    ++n;
    k += b ? 1 : 0;
  }
  double rate() const { return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n); }
};

}  // namespace detail

// n_solved counts records with solved=true and a judging outcome; that set
// conditions the gap.
inline GapReport gap_report(const std::vector<JudgeRecord>& records,
                            const std::optional<GapReport>& base = std::nullopt) {
  detail::Tally s, j, jgt;
  std::size_t solved_judged = 0;
  std::size_t solved_misjudged = 0;
  for (const auto& r : records) {
    if (r.solved) s.add(*r.solved);
    if (r.judged) j.add(*r.judged);
    if (r.judged_with_gt) jgt.add(*r.judged_with_gt);
    if (r.solved.value_or(false) && r.judged) {
      ++solved_judged;
      solved_misjudged += *r.judged ? 0 : 1;
    }
  }
  GapReport g;
  if (s.n > 0) g.s_acc = s.rate();
  if (j.n > 0) g.j_acc = j.rate();
  if (jgt.n > 0) g.j_acc_gt = jgt.rate();
  g.n_solved = solved_judged;
  g.n_total = records.size();
  if (solved_judged > 0) {
    g.gap = static_cast<double>(solved_misjudged) / static_cast<double>(solved_judged);
  }
  if (base && base->gap && g.gap) g.delta_vs_base = *g.gap - *base->gap;
  return g;
}

enum class Averaging { macro, micro };

inline Averaging parse_averaging(std::string_view s) {
  if (s == "macro") return Averaging::macro;
  if (s == "micro") return Averaging::micro;
  throw InputError("unknown averaging '" + std::string(s) + "' (macro|micro)");
}

inline constexpr const char* kAverageRow = "Average";

// Per-subset reports plus an "Average" row. Macro averages each column over
// the subsets that have it; micro pools all records. Deltas compare against
// the matching row of `base` when given.
inline std::map<std::string, GapReport> gap_reports_by_subset(
    const std::vector<JudgeRecord>& records, Averaging avg = Averaging::macro,
    const std::map<std::string, GapReport>* base = nullptr) {
  std::map<std::string, std::vector<JudgeRecord>> by;
  for (const auto& r : records) by[r.subset.empty() ? "all" : r.subset].push_back(r);

  auto base_for = [&](const std::string& name) -> std::optional<GapReport> {
    if (base == nullptr) return std::nullopt;
    auto it = base->find(name);
    return it == base->end() ? std::nullopt : std::optional<GapReport>(it->second);
  };

  std::map<std::string, GapReport> out;
  for (const auto& [name, recs] : by) out[name] = gap_report(recs, base_for(name));
  if (out.empty()) return out;

  GapReport mean;
  if (avg == Averaging::micro) {
    mean = gap_report(records);
  } else {
    std::optional<double> GapReport::*const columns[] = {&GapReport::s_acc, &GapReport::j_acc,
                                                         &GapReport::j_acc_gt, &GapReport::gap};
    for (auto col : columns) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& [name, g] : out) {
        if (g.*col) {
          sum += *(g.*col);
          ++n;
        }
      }
      if (n > 0) mean.*col = sum / static_cast<double>(n);
    }
    for (const auto& [name, g] : out) {
      mean.n_solved += g.n_solved;
      mean.n_total += g.n_total;
    }
  }
  if (auto b = base_for(kAverageRow); b && b->gap && mean.gap) mean.delta_vs_base = *mean.gap - *b->gap;
  out[kAverageRow] = mean;
  return out;
}

enum class ReportFormat { table, csv, json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "table") return ReportFormat::table;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw InputError("unknown report format '" + std::string(s) + "' (table|csv|json)");
}

namespace detail {

inline std::string pct(std::optional<double> v, bool sign = false) {
  if (!v) return "—";
  char buf[32];
  std::snprintf(buf, sizeof buf, sign ? "%+.1f" : "%.1f", *v * 100.0);
  // "-0.0" and "+0.0" read oddly in a table.
  if (std::string_view(buf) == "-0.0" || std::string_view(buf) == "+0.0") return sign ? "+0.0" : "0.0";
  return buf;
}

inline json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// Subsets in name order, then the Average row.
inline std::vector<std::string> row_order(const std::map<std::string, GapReport>& reports) {
  std::vector<std::string> rows;
  for (const auto& [name, g] : reports) {
    if (name != kAverageRow) rows.push_back(name);
  }
  if (reports.count(kAverageRow) != 0) rows.push_back(kAverageRow);
  return rows;
}

}  // namespace detail

inline constexpr std::string_view kReportColumns[] = {"S-Acc", "J-Acc", "J-Acc w/ GT",
                                                      "P(j=0|s=1)", "Δ"};

inline std::string render_report(const std::map<std::string, GapReport>& reports, ReportFormat fmt) {
  const auto rows = detail::row_order(reports);
  if (fmt == ReportFormat::json) {
    json out = {{"schema", "report.v1"}, {"version", "1.0"}, {"rows", json::array()}};
    for (const auto& name : rows) {
      const GapReport& g = reports.at(name);
      out["rows"].push_back({{"subset", name},
                             {"s_acc", detail::opt_json(g.s_acc)},
                             {"j_acc", detail::opt_json(g.j_acc)},
                             {"j_acc_gt", detail::opt_json(g.j_acc_gt)},
                             {"gap", detail::opt_json(g.gap)},
                             {"delta_vs_base", detail::opt_json(g.delta_vs_base)},
                             {"n_solved", g.n_solved},
                             {"n_total", g.n_total}});
    }
    return out.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"Subset"};
  for (auto c : kReportColumns) head.emplace_back(c);
  head.emplace_back("n_solved");
  head.emplace_back("n_total");
  cells.push_back(head);
  for (const auto& name : rows) {
    const GapReport& g = reports.at(name);
    cells.push_back({name, detail::pct(g.s_acc), detail::pct(g.j_acc), detail::pct(g.j_acc_gt),
                     detail::pct(g.gap), detail::pct(g.delta_vs_base, true),
                     std::to_string(g.n_solved), std::to_string(g.n_total)});
  }

  std::ostringstream os;
  if (fmt == ReportFormat::csv) {
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << "\n";
    }
    return os.str();
  }

  // Plain table; widths count code points so the em dash lines up.
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char ch : s) w += (ch & 0xC0) != 0x80 ? 1 : 0;
    return w;
  };
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  }
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const std::string& s = cells[r][c];
      const std::string pad(widths[c] - width(s), ' ');
      if (c > 0) os << "  ";
      os << (c == 0 ? s + pad : pad + s);
    }
    os << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      os << std::string(total + 2 * (widths.size() - 1), '-') << "\n";
    }
  }
  return os.str();
}

// record.v1 serialization.
inline constexpr const char* kRecordFamily = "record";

inline json to_json(const JudgeRecord& r) {
  auto ob = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  return {{"query_id", r.query_id},
          {"subset", r.subset},
          {"solved", ob(r.solved)},
          {"judged", ob(r.judged)},
          {"judged_with_gt", ob(r.judged_with_gt)}};
}

inline JudgeRecord record_from_json(const json& j) {
  static const char* const kKnown[] = {"query_id", "subset", "solved", "judged", "judged_with_gt"};
  if (!j.is_object()) throw FormatError("record is not an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* n) { return k == n; }) ==
        std::end(kKnown)) {
      throw FormatError("unknown record field '" + k + "'");
    }
  }
  auto ob = [&](const char* key) -> std::optional<bool> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_boolean()) throw FormatError(std::string("record field '") + key + "' must be boolean or null");
    return j[key].get<bool>();
  };
  JudgeRecord r;
  r.query_id = detail::require_string(j, "query_id");
  if (j.contains("subset")) r.subset = detail::require_string(j, "subset");
  r.solved = ob("solved");
  r.judged = ob("judged");
  r.judged_with_gt = ob("judged_with_gt");
  return r;
}

inline std::vector<JudgeRecord> read_records(const std::string& path) {
  const JsonlFile f = read_jsonl(path, kRecordFamily);
  std::vector<JudgeRecord> out;
  for (const auto& j : f.records) {
    try {
      out.push_back(record_from_json(j));
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  return out;
}

inline void write_records(const std::string& path, const std::vector<JudgeRecord>& records) {
  std::vector<json> lines;
  lines.push_back(make_header(kRecordFamily, {{"count", records.size()}}));
  for (const auto& r : records) lines.push_back(to_json(r));
  write_jsonl(path, lines);
}

}  // namespace judgekit
