#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "mineral/belief.hpp"
#include "mineral/domain.hpp"
#include "mineral/noise.hpp"
#include "mineral/planner_config.hpp"
#include "mineral/policy.hpp"

namespace mineral {

/// Throws ContractViolation unless iterations, depth, K >= 1 and alpha_obs in [0, 1).
void check_planner_config(const PlannerConfig& pc);

/// Demand-following heuristic acting on reserve estimates.
[[nodiscard]] Action demand_heuristic(const SiteVec<double>& estimates, const Observables& observed,
                                      const ProblemConfig& config);

/// Discounted return from `state` to the horizon. The rollout policy sees only
/// `belief` (updated along the way from the observations it receives), never
/// the simulated state's reserves, so rollouts carry no hidden information.
[[nodiscard]] double rollout(State state, Belief belief, const ProblemConfig& config, RolloutKind kind,
                             NoiseSource& noise, Rng& rng);

using StateSampler = std::function<State(Rng&)>;

struct RootActionStat {
  Action action;
  int visits = 0;
  double value = 0.0;
};

struct SearchResult {
  Action action;
  double value = 0.0;  // estimated optimal value at the root
  std::vector<RootActionStat> root;
  int iterations = 0;
};

[[nodiscard]] nlohmann::json to_json(const SearchResult& result);

/// Progressive-widening MCTS over observation branches with weighted particle
/// buckets. Root states come from `sampler`; `root` is the Gaussian belief the
/// rollout policy starts from. All randomness comes from `rng`.
[[nodiscard]] SearchResult search_pomcpow(const Belief& root, const StateSampler& sampler, const ProblemConfig& config,
                                          const PlannerConfig& pc, Rng& rng);

/// Sparse expectimax over K determinized scenarios (sampled state + fixed
/// counter-noise seed). Scenarios sharing an action sequence and observation
/// sequence share a tree node.
[[nodiscard]] SearchResult search_despot(const Belief& root, const StateSampler& sampler, const ProblemConfig& config,
                                         const PlannerConfig& pc, Rng& rng);

[[nodiscard]] Action plan_pomcpow(const Belief& belief, const ProblemConfig& config, const PlannerConfig& pc, Rng& rng);
[[nodiscard]] Action plan_despot(const Belief& belief, const ProblemConfig& config, const PlannerConfig& pc, Rng& rng);

/// Receives the search summary for every decision when set.
using SearchTraceSink = std::function<void(int t, const SearchResult&)>;

class PomcpowPolicy final : public Policy {
 public:
  explicit PomcpowPolicy(PlannerConfig pc, SearchTraceSink sink = {}) : pc_(pc), sink_(std::move(sink)) {}
  Action act(const Belief& belief, const ProblemConfig& config, Rng& rng) override;

 private:
  PlannerConfig pc_;
  SearchTraceSink sink_;
};

class DespotPolicy final : public Policy {
 public:
  explicit DespotPolicy(PlannerConfig pc, SearchTraceSink sink = {}) : pc_(pc), sink_(std::move(sink)) {}
  Action act(const Belief& belief, const ProblemConfig& config, Rng& rng) override;

 private:
  PlannerConfig pc_;
  SearchTraceSink sink_;
};

/// Prior for the exact oracle: reserve vectors with probabilities.
struct DiscretePrior {
  std::vector<SiteVec<double>> support;
  std::vector<double> prob;
};

struct ExactOptions {
  bool allow_explore = true;
};

struct ExactSolution {
  double value = 0.0;                    // optimal root value
  std::vector<std::pair<Action, double>> root_q;  // Q of every valid root action
  std::vector<Action> optimal;           // all root actions within 1e-9 of the optimum
};

/// Exhaustive expectimax over the discretized belief-MDP of a tiny instance.
/// Refuses (ConfigError) unless: <= 2 sites, horizon <= 4, <= 5 reserve values
/// per site, deterministic yields/losses/demand, and <= 5 observation bins.
[[nodiscard]] ExactSolution solve_exact_small(const ProblemConfig& config, const DiscretePrior& prior,
                                              const ExactOptions& options = {});

/// Belief matching a discrete prior's mean and std (for running planners against the oracle).
[[nodiscard]] Belief moment_belief(const DiscretePrior& prior, std::size_t n_sites);

}  // namespace mineral
