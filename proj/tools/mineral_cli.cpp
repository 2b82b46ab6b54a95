// mineral: run, validate, replay and trace lithium-sourcing policy experiments.
//
// Exit codes: 0 ok, 1 usage, 2 config invalid, 3 runtime failure.
// MINERAL_OUT_DIR sets the default output directory (else ./mineral-out).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mineral/baselines.hpp"
#include "mineral/config_io.hpp"
#include "mineral/harness.hpp"
#include "mineral/policies.hpp"
#include "mineral/trace_io.hpp"

namespace fs = std::filesystem;
using namespace mineral;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("MINERAL_OUT_DIR"); env && *env) return env;
  return "mineral-out";
}

struct Common {
  std::string config = "table1.default";
  std::string scenario = "accurate";
  std::uint64_t scenario_seed = 0;
  std::string out;
  std::vector<std::string> formats{"csv"};
  int threads = 0;
  bool serial = false;
  // Planner overrides; negative / empty means "keep the config value".
  int iterations = -1, depth = -1, scenarios = -1, saa = -1;
  double ucb = -1.0;
  std::string rollout;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("-c,--config", c.config, "Config path or bundled name")->capture_default_str();
  app.add_option("--scenario", c.scenario, "accurate | inaccurate | custom")
      ->check(CLI::IsMember({"accurate", "inaccurate", "custom"}))
      ->capture_default_str();
  app.add_option("--scenario-seed", c.scenario_seed, "Truth draw for the accurate scenario")->capture_default_str();
  app.add_option("-o,--out", c.out, "Output directory (default $MINERAL_OUT_DIR or ./mineral-out)");
  app.add_option("--format", c.formats, "Trace formats: csv, jsonl")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  app.add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)");
  app.add_flag("--serial", c.serial, "Run episodes serially");
  app.add_option("--iterations", c.iterations, "Planner iterations per decision");
  app.add_option("--depth", c.depth, "Planner max depth");
  app.add_option("--planner-scenarios", c.scenarios, "DESPOT-style scenario count K");
  app.add_option("--ucb", c.ucb, "UCB exploration constant");
  app.add_option("--rollout", c.rollout, "Rollout policy: demand | greedy | random")
      ->check(CLI::IsMember({"demand", "greedy", "random"}));
  app.add_option("--saa-scenarios", c.saa, "Scenario count for the stochastic open-loop baseline");
}

struct Context {
  LoadedConfig loaded;
  Scenario scenario;
  fs::path out;
};

Context prepare(const Common& c) {
  Context ctx;
  ctx.loaded = load_config(resolve_config_path(c.config));
  PlannerConfig& pc = ctx.loaded.options.planner;
  if (c.iterations >= 0) pc.iterations = c.iterations;
  if (c.depth >= 0) pc.max_depth = c.depth;
  if (c.scenarios >= 0) pc.scenarios = c.scenarios;
  if (c.ucb >= 0.0) pc.ucb_c = c.ucb;
  if (!c.rollout.empty()) pc.rollout = parse_rollout_kind(c.rollout);
  if (c.saa >= 0) ctx.loaded.options.saa_scenarios = c.saa;
  ctx.scenario = make_scenario(parse_scenario_label(c.scenario), ctx.loaded.problem, c.scenario_seed);
  ctx.out = c.out.empty() ? default_out_dir() : fs::path(c.out);
  if (c.threads > 0) omp_set_num_threads(c.threads);
  for (const auto& f : c.formats)
    if (f != "csv" && f != "jsonl") throw UsageError("unknown format '" + f + "' (expected csv or jsonl)");
  return ctx;
}

std::vector<std::string> check_policy_names(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const auto& valid = policy_names();
    if (std::find(valid.begin(), valid.end(), n) == valid.end()) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      throw UsageError("unknown policy '" + n + "'; valid policies: " + list);
    }
  }
  if (names.empty()) throw UsageError("no policies given");
  return names;
}

bool wants(const Common& c, const std::string& f) {
  return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

void write_outputs(const Common& c, const Context& ctx, const Comparison& cmp) {
  std::vector<EpisodeTrace> all;
  for (const auto& per_policy : cmp.episodes) all.insert(all.end(), per_policy.begin(), per_policy.end());
  const ProblemConfig& cfg = ctx.scenario.config;
  write_atomic(ctx.out / "summary.csv", summary_csv(cmp.rows));
  write_atomic(ctx.out / "summary.txt", summary_text(cmp.rows));
  write_atomic(ctx.out / "beliefs.csv", beliefs_csv(all, cfg));
  if (wants(c, "csv")) write_atomic(ctx.out / "episodes.csv", episodes_csv(all, cfg));
  if (wants(c, "jsonl")) write_atomic(ctx.out / "episodes.jsonl", episodes_jsonl(all, cfg));
}

int cmd_run(const Common& c, const std::vector<std::string>& policies, int seeds, std::uint64_t base_seed) {
  check_policy_names(policies);
  if (seeds < 1) throw UsageError("--seeds must be >= 1");
  const Context ctx = prepare(c);
  std::vector<PolicyFactory> factories;
  for (const auto& name : policies) {
    factories.push_back(make_policy(name, ctx.scenario.config, ctx.loaded.options, ctx.scenario.initial_belief()));
  }
  const Comparison cmp = compare_policies(ctx.scenario, factories, seeds, base_seed,
                                          c.serial ? Execution::Serial : Execution::Parallel);
  write_outputs(c, ctx, cmp);
  // Open-loop plans are saved for the replay subcommand.
  for (const auto& name : policies) {
    if (name != "deterministic" && name != "stochastic") continue;
    const Belief b = ctx.scenario.initial_belief();
    OpenLoopPlan plan;
    if (name == "deterministic") {
      plan = plan_open_loop_deterministic(b.mean, ctx.scenario.config);
    } else {
      Rng rng(ctx.loaded.options.saa_seed);
      plan = plan_open_loop_stochastic(b, ctx.scenario.config, ctx.loaded.options.saa_scenarios, rng);
    }
    write_atomic(ctx.out / ("plan_" + name + ".json"), plan_to_json(plan, name).dump(2) + "\n");
  }
  std::cout << summary_text(cmp.rows);
  std::cout << "wrote " << ctx.out.string() << "\n";
  return kOk;
}

int cmd_validate(const std::string& path) {
  const LoadedConfig loaded = load_config(resolve_config_path(path));
  std::cout << format_parameter_table(loaded.problem);
  std::cout << "config OK: " << loaded.problem.n_sites() << " sites\n";
  return kOk;
}

int cmd_replay(const Common& c, const std::string& plan_path, int seeds, std::uint64_t base_seed) {
  if (seeds < 1) throw UsageError("--seeds must be >= 1");
  const Context ctx = prepare(c);
  std::ifstream in(plan_path);
  if (!in) throw UsageError("cannot read plan file " + plan_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(plan_path + ": " + e.what());
  }
  auto plan = std::make_shared<const OpenLoopPlan>(plan_from_json(j));
  const std::string name = j.value("policy", std::string("plan"));
  const std::vector<PolicyFactory> factories{{name, [plan] { return std::make_unique<OpenLoopPolicy>(plan); }}};
  const Comparison cmp = compare_policies(ctx.scenario, factories, seeds, base_seed,
                                          c.serial ? Execution::Serial : Execution::Parallel);
  write_outputs(c, ctx, cmp);
  std::cout << summary_text(cmp.rows);
  return kOk;
}

int cmd_trace(const Common& c, const std::string& policy, std::uint64_t seed, bool search_trace) {
  check_policy_names({policy});
  const Context ctx = prepare(c);
  nlohmann::json searches = nlohmann::json::array();
  SearchTraceSink sink;
  if (search_trace)
    sink = [&](int t, const SearchResult& r) {
      auto entry = to_json(r);
      entry["t"] = t;
      searches.push_back(std::move(entry));
    };
  const PolicyFactory f =
      make_policy(policy, ctx.scenario.config, ctx.loaded.options, ctx.scenario.initial_belief(), sink);
  auto p = f.create();
  const EpisodeTrace tr = run_episode(ctx.scenario, *p, seed, policy);
  const ProblemConfig& cfg = ctx.scenario.config;
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    const StepOutcome& o = tr.steps[t].outcome;
    const Belief& b = tr.beliefs[t + 1];
    std::string mu;
    for (std::size_t k = 0; k < cfg.n_sites(); ++k)
      mu += fmt::format("{}{:.0f}±{:.0f}", k ? " " : "", b.mean[k], b.std[k]);
    std::cout << fmt::format("t={:2} {:<12} demand={:>6} processed={:>8.1f} reward={:>10.3f}  belief[{}]\n", t,
                             to_string(tr.steps[t].action), o.demand, cfg.extraction_factor * o.feed,
                             o.reward.total, mu);
  }
  const EpisodeMetrics& m = tr.metrics;
  std::cout << fmt::format("discounted reward {:.3f}, profit {:.1f} $M, CO2 {:.1f} Mt, unfulfilled {:.2f}%\n",
                           m.discounted_reward, m.profit, m.co2, m.unfulfilled_pct);
  const std::vector<EpisodeTrace> one{tr};
  if (wants(c, "csv")) write_atomic(ctx.out / "trace.csv", episodes_csv(one, cfg));
  if (wants(c, "jsonl")) write_atomic(ctx.out / "trace.jsonl", episodes_jsonl(one, cfg));
  write_atomic(ctx.out / "trace_beliefs.csv", beliefs_csv(one, cfg));
  if (search_trace) write_atomic(ctx.out / "search_trace.json", searches.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lithium sourcing under reserve uncertainty: policy experiments"};
  app.require_subcommand(1);

  Common run_opts, replay_opts, trace_opts;
  std::vector<std::string> policies{"greedy"};
  int seeds = 10, replay_seeds = 10;
  std::uint64_t base_seed = 0, replay_base = 0, trace_seed = 0;
  std::string validate_path = "table1.default", plan_path, trace_policy = "greedy";
  bool search_trace = false;

  auto* run = app.add_subcommand("run", "Compare policies over paired seeds");
  add_common(*run, run_opts);
  run->add_option("-p,--policies,--policy", policies, "Comma-separated policy names")->delimiter(',');
  run->add_option("-n,--seeds", seeds, "Number of seeds")->capture_default_str();
  run->add_option("--base-seed", base_seed, "First episode seed")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a config and print its parameter table");
  validate->add_option("config", validate_path, "Config path or bundled name")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Re-simulate a serialized open-loop plan");
  add_common(*replay, replay_opts);
  replay->add_option("--plan", plan_path, "Plan JSON written by run")->required();
  replay->add_option("-n,--seeds", replay_seeds, "Number of seeds")->capture_default_str();
  replay->add_option("--base-seed", replay_base, "First episode seed")->capture_default_str();

  auto* trace = app.add_subcommand("trace", "Verbose single-episode dump");
  add_common(*trace, trace_opts);
  trace->add_option("-p,--policy", trace_policy, "Policy name")->capture_default_str();
  trace->add_option("-s,--seed", trace_seed, "Episode seed")->capture_default_str();
  trace->add_flag("--search-trace", search_trace, "Dump planner root statistics to search_trace.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, policies, seeds, base_seed);
    if (*validate) return cmd_validate(validate_path);
    if (*replay) return cmd_replay(replay_opts, plan_path, replay_seeds, replay_base);
    if (*trace) return cmd_trace(trace_opts, trace_policy, trace_seed, search_trace);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigInvalid& e) {
    for (const auto& issue : e.issues()) std::cerr << format_issue(issue, e.source()) << "\n";
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
