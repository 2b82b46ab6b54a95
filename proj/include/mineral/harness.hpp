#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mineral/baselines.hpp"
#include "mineral/belief.hpp"
#include "mineral/dynamics.hpp"
#include "mineral/policy.hpp"

namespace mineral {

enum class ScenarioLabel { Accurate, Inaccurate, Custom };

[[nodiscard]] std::string to_string(ScenarioLabel label);
[[nodiscard]] ScenarioLabel parse_scenario_label(const std::string& text);

struct Scenario {
  ProblemConfig config;
  SiteVec<double> true_reserves;
  SiteVec<double> prior_mean;
  SiteVec<double> prior_std;
  ScenarioLabel label = ScenarioLabel::Custom;

  [[nodiscard]] Belief initial_belief() const;
};

/// Truth drawn from the prior, truncated to |v* - mu0| <= 1.96 sigma0 and
/// rounded to the reserve bin. `seed` picks the draw.
[[nodiscard]] Scenario accurate_scenario(const ProblemConfig& config, std::uint64_t seed = 0);

/// Truth at mu0 + sign_j * 4 sigma0 (clamped at 0). Default signs +,-,+,-,...
[[nodiscard]] Scenario inaccurate_scenario(const ProblemConfig& config, std::span<const int> signs = {});

[[nodiscard]] Scenario make_scenario(ScenarioLabel label, const ProblemConfig& config, std::uint64_t seed = 0);

struct StepRecord {
  Action action;
  StepOutcome outcome;
};

struct EpisodeMetrics {
  std::optional<int> first_domestic_build;  // t of the first domestic BUILD
  double processed = 0.0;                   // sum of rho * l_t, Mt
  double co2 = 0.0;                         // sum of R2, Mt
  double demand = 0.0;                      // sum of d_t
  double unfulfilled = 0.0;                 // sum of R3
  double unfulfilled_pct = 0.0;             // 100 * unfulfilled / demand
  double profit = 0.0;                      // undiscounted sum of R4, $M
  double discounted_reward = 0.0;

  friend bool operator==(const EpisodeMetrics&, const EpisodeMetrics&) = default;
};

struct EpisodeTrace {
  std::string policy;
  std::uint64_t seed = 0;
  State initial;
  std::vector<StepRecord> steps;
  std::vector<Belief> beliefs;  // before each step, plus the terminal belief
  EpisodeMetrics metrics;       // accumulated while running
};

/// Runs one episode to the horizon. The world draws from CounterNoise(seed);
/// the policy gets its own engine seeded from (seed, Stream::Policy).
[[nodiscard]] EpisodeTrace run_episode(const Scenario& scenario, Policy& policy, std::uint64_t seed,
                                       const std::string& policy_name = "");

/// Recomputes every metric from the step records alone.
[[nodiscard]] EpisodeMetrics metrics_from_trace(const EpisodeTrace& trace, const ProblemConfig& config);

[[nodiscard]] double discounted_return(std::span<const double> rewards, double gamma);
[[nodiscard]] double discounted_return(const EpisodeTrace& trace, double gamma);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample std (n - 1); 0 for n < 2
  double median = 0.0;
  int n = 0;
};

[[nodiscard]] Stat summarize(std::span<const double> xs);

struct PolicySummary {
  std::string policy;
  int seeds = 0;
  Stat first_domestic_build;  // over seeds that built domestically
  int never_domestic = 0;
  Stat processed, co2, unfulfilled_pct, profit, discounted_reward;
};

[[nodiscard]] PolicySummary summarize(const std::string& policy, std::span<const EpisodeMetrics> episodes);

struct Comparison {
  std::vector<PolicySummary> rows;
  std::vector<std::vector<EpisodeTrace>> episodes;  // [policy][seed index]
};

/// Seeds base_seed .. base_seed + n_seeds - 1, paired across policies.
/// Parallel execution fans (policy, seed) pairs across OpenMP threads; results
/// are identical to the serial path.
[[nodiscard]] Comparison compare_policies(const Scenario& scenario, std::span<const PolicyFactory> policies, int n_seeds,
                                          std::uint64_t base_seed = 0, Execution exec = Execution::Parallel);

}  // namespace mineral
