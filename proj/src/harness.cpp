#include "mineral/harness.hpp"

#include <algorithm>
#include <cmath>

namespace mineral {

std::string to_string(ScenarioLabel label) {
  switch (label) {
    case ScenarioLabel::Accurate: return "accurate";
    case ScenarioLabel::Inaccurate: return "inaccurate";
    case ScenarioLabel::Custom: return "custom";
  }
  return "custom";
}

ScenarioLabel parse_scenario_label(const std::string& text) {
  if (text == "accurate") return ScenarioLabel::Accurate;
  if (text == "inaccurate") return ScenarioLabel::Inaccurate;
  if (text == "custom") return ScenarioLabel::Custom;
  throw ConfigError("unknown scenario '" + text + "' (expected accurate, inaccurate or custom)");
}

Belief Scenario::initial_belief() const {
  return make_belief(prior_mean, prior_std, initial_observables(config.n_sites()));
}

namespace {

Scenario base_scenario(const ProblemConfig& config, ScenarioLabel label) {
  const std::size_t n = config.n_sites();
  Scenario s;
  s.config = config;
  s.label = label;
  s.prior_mean = SiteVec<double>(n);
  s.prior_std = SiteVec<double>(n, config.initial_belief_std);
  for (std::size_t j = 0; j < n; ++j) s.prior_mean[j] = config.sites[j].initial_reserve;
  s.true_reserves = s.prior_mean;
  return s;
}

}  // namespace

Scenario accurate_scenario(const ProblemConfig& config, std::uint64_t seed) {
  Scenario s = base_scenario(config, ScenarioLabel::Accurate);
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(Stream::Truth)));
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    const double mu = s.prior_mean[j], sigma = s.prior_std[j];
    double v = mu;
    // Rejection sampling keeps the truncated normal exact; binning may push a
    // draw just past the edge, so the bound is rechecked after rounding.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double draw = std::max(0.0, round_to_bin(mu + sigma * standard_normal(rng), config.reserve_bin));
      if (std::abs(draw - mu) <= 1.96 * sigma) {
        v = draw;
        break;
      }
    }
    s.true_reserves[j] = v;
  }
  return s;
}

Scenario inaccurate_scenario(const ProblemConfig& config, std::span<const int> signs) {
  Scenario s = base_scenario(config, ScenarioLabel::Inaccurate);
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    const int sign = j < signs.size() ? signs[j] : (j % 2 == 0 ? 1 : -1);
    if (sign != 1 && sign != -1) throw ConfigError("inaccurate-scenario signs must be +1 or -1");
    s.true_reserves[j] = std::max(0.0, s.prior_mean[j] + sign * 4.0 * s.prior_std[j]);
  }
  return s;
}

Scenario make_scenario(ScenarioLabel label, const ProblemConfig& config, std::uint64_t seed) {
  switch (label) {
    case ScenarioLabel::Accurate: return accurate_scenario(config, seed);
    case ScenarioLabel::Inaccurate: return inaccurate_scenario(config);
    case ScenarioLabel::Custom: return base_scenario(config, ScenarioLabel::Custom);
  }
  return base_scenario(config, label);
}

namespace {

void accumulate(EpisodeMetrics& m, const StepRecord& rec, const ProblemConfig& config, double discount) {
  const StepOutcome& o = rec.outcome;
  if (!m.first_domestic_build && rec.action.kind == ActionKind::Build &&
      config.sites[static_cast<std::size_t>(rec.action.site)].domestic)
    m.first_domestic_build = o.next_state.observed.t - 1;
  m.processed += config.extraction_factor * o.feed;
  m.co2 += o.reward.r2_emissions;
  m.demand += o.demand;
  m.unfulfilled += o.reward.r3_unfulfilled;
  m.profit += o.reward.r4_profit;
  m.discounted_reward += discount * o.reward.total;
}

void finish(EpisodeMetrics& m) { m.unfulfilled_pct = m.demand > 0.0 ? 100.0 * m.unfulfilled / m.demand : 0.0; }

}  // namespace

EpisodeTrace run_episode(const Scenario& scenario, Policy& policy, std::uint64_t seed, const std::string& policy_name) {
  const ProblemConfig& config = scenario.config;
  CounterNoise world(seed);
  Rng policy_rng(mix_seed(seed, static_cast<std::uint64_t>(Stream::Policy)));

  EpisodeTrace trace;
  trace.policy = policy_name;
  trace.seed = seed;
  trace.initial = initial_state(config, scenario.true_reserves);
  State state = trace.initial;
  Belief belief = scenario.initial_belief();
  double discount = 1.0;
  while (!is_terminal(state.observed, config)) {
    trace.beliefs.push_back(belief);
    const Action a = policy.act(belief, config, policy_rng);
    if (!is_valid_action(a, state.observed, config))
      throw ContractViolation("policy '" + policy_name + "' returned invalid action " + to_string(a) +
                              " at t=" + std::to_string(state.observed.t));
    StepRecord rec{a, step(state, a, config, world)};
    belief = update(belief, a, rec.outcome.observation, rec.outcome.next_state.observed, config);
    state = rec.outcome.next_state;
    accumulate(trace.metrics, rec, config, discount);
    discount *= config.discount;
    trace.steps.push_back(std::move(rec));
  }
  trace.beliefs.push_back(belief);
  finish(trace.metrics);
  return trace;
}

EpisodeMetrics metrics_from_trace(const EpisodeTrace& trace, const ProblemConfig& config) {
  EpisodeMetrics m;
  double discount = 1.0;
  for (const StepRecord& rec : trace.steps) {
    accumulate(m, rec, config, discount);
    discount *= config.discount;
  }
  finish(m);
  return m;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double total = 0.0, discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

double discounted_return(const EpisodeTrace& trace, double gamma) {
  std::vector<double> rewards;
  rewards.reserve(trace.steps.size());
  for (const StepRecord& rec : trace.steps) rewards.push_back(rec.outcome.reward.total);
  return discounted_return(rewards, gamma);
}

Stat summarize(std::span<const double> xs) {
  Stat s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

PolicySummary summarize(const std::string& policy, std::span<const EpisodeMetrics> episodes) {
  PolicySummary row;
  row.policy = policy;
  row.seeds = static_cast<int>(episodes.size());
  std::vector<double> first, processed, co2, unfulfilled, profit, reward;
  for (const EpisodeMetrics& m : episodes) {
    if (m.first_domestic_build)
      first.push_back(*m.first_domestic_build);
    else
      ++row.never_domestic;
    processed.push_back(m.processed);
    co2.push_back(m.co2);
    unfulfilled.push_back(m.unfulfilled_pct);
    profit.push_back(m.profit);
    reward.push_back(m.discounted_reward);
  }
  row.first_domestic_build = summarize(first);
  row.processed = summarize(processed);
  row.co2 = summarize(co2);
  row.unfulfilled_pct = summarize(unfulfilled);
  row.profit = summarize(profit);
  row.discounted_reward = summarize(reward);
  return row;
}

Comparison compare_policies(const Scenario& scenario, std::span<const PolicyFactory> policies, int n_seeds,
                            std::uint64_t base_seed, Execution exec) {
  if (n_seeds < 1) throw ContractViolation("compare_policies needs at least one seed");
  const std::size_t n_pol = policies.size();
  const auto seeds = static_cast<std::size_t>(n_seeds);
  Comparison out;
  out.episodes.assign(n_pol, std::vector<EpisodeTrace>(seeds));
  const auto jobs = static_cast<long>(n_pol * seeds);

  auto run_job = [&](long job) {
    const auto p = static_cast<std::size_t>(job) / seeds;
    const auto k = static_cast<std::size_t>(job) % seeds;
    auto policy = policies[p].create();
    out.episodes[p][k] = run_episode(scenario, *policy, base_seed + k, policies[p].name);
  };

  if (exec == Execution::Serial) {
    for (long job = 0; job < jobs; ++job) run_job(job);
  } else {
    // Exceptions must not escape an OpenMP region; keep the first by job order.
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic)
    for (long job = 0; job < jobs; ++job) {
      try {
        run_job(job);
      } catch (...) {
        errors[static_cast<std::size_t>(job)] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (std::size_t p = 0; p < n_pol; ++p) {
    std::vector<EpisodeMetrics> metrics;
    for (const EpisodeTrace& tr : out.episodes[p]) metrics.push_back(tr.metrics);
    out.rows.push_back(summarize(policies[p].name, metrics));
  }
  return out;
}

}  // namespace mineral
