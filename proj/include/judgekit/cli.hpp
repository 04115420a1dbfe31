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

// Command-line front end. Exit codes:
//   0  success
//   1  model failures (unparseable verdicts/answers) above eval.max_failure_rate
//   2  configuration or input error, bad usage
//   3  endpoint or infrastructure error

#pragma once

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "judgekit/advantage.hpp"
#include "judgekit/completion_source.hpp"
#include "judgekit/config.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/evaluator.hpp"
#include "judgekit/gateway.hpp"
#include "judgekit/jsonl.hpp"
#include "judgekit/policy_sim.hpp"
#include "judgekit/preference_pair.hpp"
#include "judgekit/prompts.hpp"
#include "judgekit/reward.hpp"
#include "judgekit/schemas.hpp"
#include "judgekit/synth.hpp"

namespace judgekit {

enum ExitCode : int {
  kExitOk = 0,
  kExitModelFailures = 1,
  kExitConfig = 2,
  kExitEndpoint = 3,
};

// Injection points for tests.
struct CliEnv {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  std::shared_ptr<Transport> transport = std::make_shared<HttplibTransport>();
};

namespace cli_detail {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::string endpoint;
  std::string in;
  std::string out;
  std::optional<int> cap;
  bool swap_positions = false;
  int trials = 10;

  std::string replay;
  std::string cache;
  std::string format = "table";
  std::string kind = "auto";
  bool with_gt = false;
  bool no_solve = false;
  std::string pairs;
  std::string traj;
  std::string base;
  std::string average;
  std::string scorer;
  std::optional<int> steps;
  std::optional<int> group_size;
  std::string metrics_out;
  std::vector<std::string> ingest;
  std::string source = "custom";
  std::vector<std::string> mix;
  std::string question;
  std::string answer_a;
  std::string answer_b;
  std::string ground_truth;
  std::string id;
};

inline RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? parse_config(nlohmann::json::object()) : load_config(o.config);
  if (o.mode) {
    c.reward_mode = parse_reward_mode(*o.mode);
    c.sim.mode = c.reward_mode;
  }
  if (o.cap) {
    c.eval.subsample_cap = *o.cap;
    c.eval.validate();
  }
  if (o.swap_positions) c.eval.swap_positions = true;
  if (!o.average.empty()) c.averaging = parse_averaging(o.average);
  return c;
}

inline void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required flag ") + flag);
}

// Completions come from (a) a replay cache only, (b) a live endpoint, or
// (c) a live endpoint recorded into a cache file.
class Sources {
 public:
  Sources(const RunConfig& cfg, const Options& o, const std::string& endpoint_name, CliEnv& env) {
    if (!o.replay.empty()) {
      if (!o.cache.empty()) throw ConfigError("--replay and --cache are mutually exclusive");
      source_ = std::make_unique<ReplaySource>(CompletionCache::load(o.replay));
      return;
    }
    require_flag(endpoint_name, "--endpoint (or 'judge' in config)");
    const EndpointConfig& ep = cfg.endpoint(endpoint_name);
    if (ep.role != EndpointRole::chat) {
      throw ConfigError("endpoint '" + ep.name + "' is not a chat endpoint");
    }
    client_ = std::make_unique<EndpointClient>(ep, env.transport);
    live_ = std::make_unique<GatewaySource>(*client_, cfg.sampling);
    if (!o.cache.empty()) {
      cache_path_ = o.cache;
      std::ifstream probe(o.cache);
      if (probe) cache_ = CompletionCache::load(o.cache);
      source_ = std::make_unique<RecordingSource>(*live_, cache_);
    }
  }

  CompletionSource& get() { return source_ ? *source_ : *live_; }

  void save() const {
    if (!cache_path_.empty()) cache_.save(cache_path_);
  }

 private:
  std::unique_ptr<EndpointClient> client_;
  std::unique_ptr<CompletionSource> live_;
  CompletionCache cache_;
  std::string cache_path_;
  std::unique_ptr<CompletionSource> source_;
};

inline std::string judge_endpoint(const RunConfig& cfg, const Options& o) {
  return o.endpoint.empty() ? cfg.judge : o.endpoint;
}

inline void emit(CliEnv& env, const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    env.out << text;
  } else {
    write_text(out_path, text);
  }
}

// ---------------------------------------------------------------- synth

inline int cmd_synth(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  require_flag(o.out, "--out");
  std::vector<PreferencePair> pairs;

  if (!o.mix.empty()) {
    std::vector<SourceQuota> quotas;
    for (const auto& spec : o.mix) {
      const auto eq = spec.rfind('=');
      if (eq == std::string::npos) throw ConfigError("--mix expects PATH=QUOTA, got '" + spec + "'");
      SourceQuota q;
      q.pairs = read_pairs(spec.substr(0, eq));
      q.source = q.pairs.empty() ? Source::custom : q.pairs.front().source;
      try {
        q.quota = std::stoul(spec.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("--mix: bad quota in '" + spec + "'");
      }
      quotas.push_back(std::move(q));
    }
    pairs = mix_dataset(quotas, o.seed.value_or(cfg.synth.seed));
  } else if (!o.ingest.empty()) {
    const Source src = parse_source(o.source);
    for (const auto& path : o.ingest) {
      IngestResult r = ingest_external(path, src);
      for (const auto& d : r.diagnostics) env.err << d << "\n";
      env.err << path << ": " << r.pairs.size() << " pairs, " << r.n_invalid << " invalid\n";
      for (auto& p : r.pairs) pairs.push_back(std::move(p));
    }
  } else {
    require_flag(o.in, "--in (qa.v1), --ingest or --mix");
    if (cfg.synth.generators.empty() && o.replay.empty()) {
      throw ConfigError("synth.generators is empty");
    }
    SynthConfig scfg = cfg.synth;
    if (o.seed) scfg.seed = *o.seed;
    const auto items = read_qa(o.in);
    // Generators share one prompt per query; sample indices are disjoint
    // per generator so cached completions never collide.
    std::vector<std::string> gens = scfg.generators;
    if (gens.empty()) gens.push_back("");
    std::vector<std::vector<std::string>> responses(items.size());
    std::size_t n_failed = 0;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      Sources src(cfg, o, gens[g], env);
      std::vector<CompletionRequest> reqs;
      for (const auto& q : items) {
        for (int k = 0; k < scfg.samples_per_query; ++k) {
          reqs.push_back({render_prompt(PromptKind::solve_only, q.query),
                          static_cast<int>(g) * scfg.samples_per_query + k});
        }
      }
      const auto res = src.get().complete_all(reqs);
      src.save();
      for (std::size_t i = 0; i < res.size(); ++i) {
        if (res[i].ok()) {
          responses[i / scfg.samples_per_query].push_back(*res[i].text);
        } else {
          ++n_failed;
        }
      }
    }
    if (!items.empty() && n_failed == items.size() * gens.size() * scfg.samples_per_query) {
      throw EndpointError("synth: every completion request failed");
    }
    std::size_t single_sided = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (responses[i].empty()) continue;
      auto made = synthesize_pairs(items[i].query, items[i].answer, responses[i], scfg);
      if (made.empty()) ++single_sided;
      for (auto& p : made) {
        p.subset = items[i].subset;
        pairs.push_back(std::move(p));
      }
    }
    env.err << "synth: " << pairs.size() << " pairs from " << items.size() << " queries ("
            << single_sided << " single-sided discarded, " << n_failed << " failed requests)\n";
  }
  write_pairs(o.out, pairs);
  return kExitOk;
}

// -------------------------------------------------------------- rollout

inline int cmd_rollout(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  require_flag(o.in, "--in");
  require_flag(o.out, "--out");
  const auto pairs = read_pairs(o.in);
  const int n = o.group_size.value_or(cfg.advantage.group_size);
  if (n < 1) throw ConfigError("--group-size must be >= 1");

  std::vector<CompletionRequest> reqs;
  for (const auto& p : pairs) {
    const std::string prompt =
        render_prompt(s2j_prompt_for(p.kind), p.query, p.response_a, p.response_b);
    for (int k = 0; k < n; ++k) reqs.push_back({prompt, k});
  }
  Sources src(cfg, o, judge_endpoint(cfg, o), env);
  const auto res = src.get().complete_all(reqs);
  src.save();

  std::vector<RolloutRecord> out;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& p = pairs[i / n];
    if (!res[i].ok()) {
      if (failed++ == 0) env.err << "rollout: " << p.id << ": " << res[i].error << "\n";
      continue;
    }
    out.push_back({p.id, static_cast<int>(i % n), p.kind, reqs[i].prompt,
                   parse_trajectory(*res[i].text, p.kind)});
  }
  write_rollouts(o.out, out);
  if (failed > 0) {
    env.err << "rollout: " << failed << " of " << res.size() << " completions failed\n";
    return kExitEndpoint;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- score

inline int cmd_score(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  require_flag(o.in, "--in (trajectory.v1)");
  require_flag(o.pairs, "--pairs");
  require_flag(o.out, "--out");
  const auto rollouts = read_rollouts(o.in);
  std::map<std::string, PreferencePair> by_id;
  for (auto& p : read_pairs(o.pairs)) by_id.emplace(p.id, std::move(p));

  const RewardMode mode = cfg.reward_mode;
  std::unique_ptr<EndpointClient> scorer;
  auto scorer_client = [&]() -> EndpointClient& {
    if (!scorer) {
      const std::string name = o.scorer.empty() ? cfg.scorer : o.scorer;
      require_flag(name, "--scorer (or 'scorer' in config) for subjective instances");
      const EndpointConfig& ep = cfg.endpoint(name);
      if (ep.role != EndpointRole::scorer) throw ConfigError("endpoint '" + name + "' is not a scorer");
      scorer = std::make_unique<EndpointClient>(ep, env.transport);
    }
    return *scorer;
  };

  std::vector<RewardRecord> out;
  std::size_t fallbacks = 0;
  for (const auto& r : rollouts) {
    auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) throw InputError("trajectory for unknown instance '" + r.instance_id + "'");
    const PreferencePair& p = it->second;
    RewardRecord rec;
    rec.instance_id = r.instance_id;
    rec.sample = r.sample;
    std::optional<ScoreTriple> scores;
    if (p.kind == TaskKind::subjective && involves_solving(mode)) {
      EndpointClient& sc = scorer_client();
      try {
        ScoreTriple s;
        s.s_better = sc.score(p.query, p.preferred());
        s.s_worse = sc.score(p.query, p.rejected());
        s.s_self = r.trajectory.self_solution ? sc.score(p.query, *r.trajectory.self_solution) : 0.0;
        scores = s;
      } catch (const EndpointError& e) {
        // Scorer trouble degrades to the gate-failure path.
        if (fallbacks++ == 0) env.err << "score: scorer unavailable (" << e.what() << ")\n";
        scores = ScoreTriple::unavailable();
        rec.scores_available = false;
      }
    }
    rec.reward = total_reward(r.trajectory, p, scores, mode);
    out.push_back(std::move(rec));
  }
  write_rewards(o.out, out);
  if (fallbacks > 0) env.err << "score: " << fallbacks << " trajectories fell back to judge-only reward\n";
  return kExitOk;
}

// ------------------------------------------------------------ advantage

inline int cmd_advantage(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  require_flag(o.in, "--in (reward.v1)");
  require_flag(o.traj, "--traj");
  require_flag(o.out, "--out");
  AdvantageConfig acfg = cfg.advantage;
  if (o.group_size) acfg.group_size = *o.group_size;
  acfg.validate();

  std::map<std::pair<std::string, int>, const RolloutRecord*> traj;
  const auto rollouts = read_rollouts(o.traj);
  for (const auto& r : rollouts) traj[{r.instance_id, r.sample}] = &r;

  std::vector<RolloutGroup> groups;
  std::map<std::string, std::size_t> where;
  for (const auto& rw : read_rewards(o.in)) {
    auto t = traj.find({rw.instance_id, rw.sample});
    if (t == traj.end()) {
      throw InputError("reward for " + rw.instance_id + "#" + std::to_string(rw.sample) +
                       " has no trajectory");
    }
    auto [it, fresh] = where.try_emplace(rw.instance_id, groups.size());
    if (fresh) {
      groups.emplace_back();
      groups.back().instance_id = rw.instance_id;
      groups.back().prompt = t->second->prompt;
    }
    RolloutGroup& g = groups[it->second];
    g.responses.push_back(t->second->trajectory.raw_text);
    g.rewards.push_back(rw.reward.total);
  }
  for (auto& g : groups) g = filter_group(std::move(g), acfg);
  const auto batch = export_training_batch(groups, acfg);
  write_jsonl(o.out, batch);
  env.err << "advantage: " << batch.front()["n_kept"] << " of " << groups.size()
          << " groups kept\n";
  return kExitOk;
}

// ------------------------------------------------------------- evaluate

inline int cmd_evaluate(const Options& o, CliEnv& env) {
  RunConfig cfg = load(o);
  if (o.seed) cfg.eval.seed = *o.seed;
  require_flag(o.in, "--in (pair.v1 benchmark)");
  require_flag(o.out, "--out");
  const auto bench = subsample(read_pairs(o.in), cfg.eval);
  std::optional<PromptKind> kind;
  if (o.kind != "auto") kind = parse_prompt_kind(o.kind);

  Sources src(cfg, o, judge_endpoint(cfg, o), env);
  std::vector<EvalResult> results;
  results.push_back(evaluate_judging(src.get(), bench, kind, cfg.eval));

  std::vector<PreferencePair> with_truth;
  for (const auto& p : bench) {
    if (p.ground_truth) with_truth.push_back(p);
  }
  if (!o.no_solve) results.push_back(evaluate_solving(src.get(), with_truth, cfg.eval));
  if (o.with_gt) {
    results.push_back(evaluate_judging(src.get(), with_truth, PromptKind::judge_with_gt, cfg.eval));
  }
  src.save();

  std::vector<std::vector<JudgeRecord>> lists;
  std::size_t items = 0, failed = 0, format = 0;
  for (const auto& r : results) {
    lists.push_back(r.records);
    items += r.n_items;
    failed += r.n_failed;
    format += r.n_format_failures;
    for (std::size_t i = 0; i < r.failures.size() && i < 3; ++i) env.err << "evaluate: " << r.failures[i] << "\n";
  }
  write_records(o.out, join_records(lists));
  env.err << "evaluate: " << bench.size() << " items, " << failed << " evaluation failures, "
          << format << " format failures\n";
  std::vector<std::string> own;
  if (!o.no_solve) own.emplace_back("solve_only");
  if (o.with_gt || kind == PromptKind::judge_with_gt) own.emplace_back("judge_with_gt");
  for (const auto& t : own) env.err << "evaluate: note: the " << t << " template is defined by this toolkit\n";

  const double denom = static_cast<double>(std::max<std::size_t>(items, 1));
  if (static_cast<double>(failed) / denom > cfg.eval.max_failure_rate) return kExitEndpoint;
  if (static_cast<double>(format) / denom > cfg.eval.max_failure_rate) return kExitModelFailures;
  return kExitOk;
}

// ----------------------------------------------------------- gap-report

inline int cmd_gap_report(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  require_flag(o.in, "--in (record.v1)");
  const ReportFormat fmt = parse_report_format(o.format);
  std::optional<std::map<std::string, GapReport>> base;
  if (!o.base.empty()) base = gap_reports_by_subset(read_records(o.base), cfg.averaging);
  const auto reports =
      gap_reports_by_subset(read_records(o.in), cfg.averaging, base ? &*base : nullptr);
  emit(env, o.out, render_report(reports, fmt));
  return kExitOk;
}

// ------------------------------------------------------------- simulate

inline int cmd_simulate(const Options& o, CliEnv& env) {
  const RunConfig cfg = load(o);
  SimConfig sim = cfg.sim;
  if (o.seed) sim.seed = *o.seed;
  if (o.steps) sim.steps = *o.steps;
  if (o.group_size) sim.group_size = *o.group_size;
  sim.validate();
  if (o.format != "table" && o.format != "json") throw ConfigError("--format must be table or json");

  const ComparisonReport rep = run_comparison(sim, o.trials);
  emit(env, o.out,
       o.format == "json" ? comparison_to_json(rep).dump(2) + "\n" : render_comparison_table(rep));
  if (!o.metrics_out.empty()) {
    SimConfig one = sim;
    one.mode = cfg.reward_mode;
    write_text(o.metrics_out, metrics_csv(run_trial(one).metrics));
  }
  return kExitOk;
}

// -------------------------------------------------------- render-prompt

inline int cmd_render_prompt(const Options& o, CliEnv& env) {
  if (o.kind == "auto") throw ConfigError("render-prompt needs --kind");
  const PromptKind kind = parse_prompt_kind(o.kind);
  auto opt = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string_view>(s);
  };
  std::string text;
  if (!o.in.empty()) {
    require_flag(o.id, "--id");
    for (const auto& p : read_pairs(o.in)) {
      if (p.id != o.id) continue;
      std::optional<std::string_view> gt;
      if (p.ground_truth) gt = *p.ground_truth;
      text = render_prompt(kind, p.query, p.response_a, p.response_b, gt);
      emit(env, o.out, text);
      return kExitOk;
    }
    throw InputError("no pair with id '" + o.id + "' in " + o.in);
  }
  text = render_prompt(kind, o.question, opt(o.answer_a), opt(o.answer_b), opt(o.ground_truth));
  emit(env, o.out, text);
  return kExitOk;
}

}  // namespace cli_detail

// Parses argv-style arguments (without the program name) and runs one
// command. Never throws.
inline int dispatch(const std::vector<std::string>& args, CliEnv env = {}) {
  using namespace cli_detail;
  Options o;
  CLI::App app{"judgekit: preference-pair synthesis, judge rewards, and solve-to-judge gap evaluation",
               "judgekit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "Run configuration (JSON)");
  app.add_option("--seed", o.seed, "Override the seed of the command");
  app.add_option("--mode", o.mode, "Reward mode")->check(CLI::IsMember({"s2j", "judge_only", "solve_only"}));
  app.add_option("--endpoint", o.endpoint, "Endpoint name from config");
  app.add_option("--in", o.in, "Input file");
  app.add_option("--out", o.out, "Output file");

  auto* synth = app.add_subcommand("synth", "Synthesize, ingest or mix preference pairs");
  synth->add_option("--ingest", o.ingest, "External pair corpus to ingest (repeatable)");
  synth->add_option("--source", o.source, "Source tag for ingested pairs");
  synth->add_option("--mix", o.mix, "PATH=QUOTA pair.v1 file and sample size (repeatable)");
  synth->add_option("--replay", o.replay, "Serve completions from this cache only");
  synth->add_option("--cache", o.cache, "Record live completions into this cache");

  auto* rollout = app.add_subcommand("rollout", "Sample judge trajectories for pairs");
  rollout->add_option("--group-size", o.group_size, "Rollouts per instance");
  rollout->add_option("--replay", o.replay, "Serve completions from this cache only");
  rollout->add_option("--cache", o.cache, "Record live completions into this cache");

  auto* score = app.add_subcommand("score", "Compute rewards for trajectories");
  score->add_option("--pairs", o.pairs, "pair.v1 file the trajectories refer to");
  score->add_option("--scorer", o.scorer, "Scorer endpoint for subjective instances");

  auto* adv = app.add_subcommand("advantage", "Group-normalized advantages and training batch");
  adv->add_option("--traj", o.traj, "trajectory.v1 file the rewards refer to");
  adv->add_option("--group-size", o.group_size, "Expected rollouts per group");

  auto* eval = app.add_subcommand("evaluate", "Judging and solving evaluation on a benchmark");
  eval->add_option("--cap", o.cap, "Subsample cap");
  eval->add_flag("--swap-positions", o.swap_positions, "Judge both slot orders");
  eval->add_option("--kind", o.kind, "Judging prompt kind, or auto");
  eval->add_flag("--with-gt", o.with_gt, "Also judge with the reference answer in the prompt");
  eval->add_flag("--no-solve", o.no_solve, "Skip the solving evaluation");
  eval->add_option("--replay", o.replay, "Serve completions from this cache only");
  eval->add_option("--cache", o.cache, "Record live completions into this cache");

  auto* gap = app.add_subcommand("gap-report", "Solve-to-judge gap report from records");
  gap->add_option("--base", o.base, "Base-model records for the delta column");
  gap->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  gap->add_option("--average", o.average, "macro or micro")->check(CLI::IsMember({"macro", "micro"}));

  auto* sim = app.add_subcommand("simulate", "Compare reward modes in the policy simulator");
  sim->add_option("--trials", o.trials, "Seeded trials per mode");
  sim->add_option("--steps", o.steps, "Policy steps per trial");
  sim->add_option("--group-size", o.group_size, "Trajectories per step");
  sim->add_option("--format", o.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  sim->add_option("--metrics-out", o.metrics_out, "Per-step CSV of one trial in --mode");

  auto* render = app.add_subcommand("render-prompt", "Render a prompt template");
  render->add_option("--kind", o.kind, "Prompt kind")->required();
  render->add_option("--question", o.question, "Question text");
  render->add_option("--a", o.answer_a, "Response A");
  render->add_option("--b", o.answer_b, "Response B");
  render->add_option("--gt", o.ground_truth, "Reference answer");
  render->add_option("--id", o.id, "Pair id to render from --in");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    env.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    env.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    env.err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, env);
    if (rollout->parsed()) return cmd_rollout(o, env);
    if (score->parsed()) return cmd_score(o, env);
    if (adv->parsed()) return cmd_advantage(o, env);
    if (eval->parsed()) return cmd_evaluate(o, env);
    if (gap->parsed()) return cmd_gap_report(o, env);
    if (sim->parsed()) return cmd_simulate(o, env);
    if (render->parsed()) return cmd_render_prompt(o, env);
  } catch (const EndpointError& e) {
    env.err << "endpoint error: " << e.what() << "\n";
    return kExitEndpoint;
  } catch (const Error& e) {
    env.err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    env.err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  env.err << app.help();
  return kExitConfig;
}

}  // namespace judgekit
