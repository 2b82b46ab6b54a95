#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "mineral/belief.hpp"
#include "mineral/domain.hpp"
#include "mineral/noise.hpp"
#include "mineral/policy.hpp"

namespace mineral {

/// Uniform over valid_actions.
[[nodiscard]] Action random_policy(const Observables& observed, const ProblemConfig& config, Rng& rng);

/// Never explores. Restores an operating site whose estimate has reached 0;
/// otherwise builds the unbuilt site with the largest positive estimate,
/// skipping domestic sites until t >= t_d; otherwise does nothing.
[[nodiscard]] Action greedy_policy(const SiteVec<double>& estimates, const Observables& observed,
                                   const ProblemConfig& config);

/// Builds foreign sites, largest estimate first, as early as possible. Never
/// touches domestic sites.
[[nodiscard]] Action import_only_policy(const SiteVec<double>& estimates, const Observables& observed,
                                        const ProblemConfig& config);

/// A fixed action per year, chosen before execution.
struct OpenLoopPlan {
  std::vector<Action> actions;  // length = horizon
  double objective = 0.0;       // discounted weighted objective claimed by the optimizer
};

/// One reserve scenario for open-loop scoring. Without a noise seed every
/// variate sits at its mean (certainty-equivalent model).
struct PlanScenario {
  SiteVec<double> reserves;
  std::optional<std::uint64_t> noise_seed;
};

enum class Execution { Serial, Parallel };

/// Exact maximizer of the sample-average discounted objective over every
/// EXPLORE-free open-loop plan, by backward induction over per-site status
/// (unbuilt, operating since build year b, restored). Ties prefer DO_NOTHING,
/// then lower site index, then BUILD before RESTORE.
[[nodiscard]] OpenLoopPlan solve_open_loop(const ProblemConfig& config, std::span<const PlanScenario> scenarios,
                                           Execution exec = Execution::Parallel);

/// Certainty-equivalent plan: reserves = estimates, every variate at its mean.
[[nodiscard]] OpenLoopPlan plan_open_loop_deterministic(const SiteVec<double>& estimates, const ProblemConfig& config,
                                                        Execution exec = Execution::Parallel);

/// N reserve scenarios drawn from `initial` (with their own yield/loss/demand
/// noise), scored by sample average.
[[nodiscard]] std::vector<PlanScenario> draw_plan_scenarios(const Belief& initial, const ProblemConfig& config, int n,
                                                            Rng& rng);
[[nodiscard]] OpenLoopPlan plan_open_loop_stochastic(const Belief& initial, const ProblemConfig& config, int n,
                                                     Rng& rng, Execution exec = Execution::Parallel);

/// Sample-average discounted objective of `actions`, by direct simulation.
[[nodiscard]] double evaluate_plan(std::span<const Action> actions, const ProblemConfig& config,
                                   std::span<const PlanScenario> scenarios);

/// Action sequence produced by running `policy` against the certainty-equivalent
/// model from the given estimates.
[[nodiscard]] std::vector<Action> induced_plan(Policy& policy, const SiteVec<double>& estimates,
                                               const ProblemConfig& config);

[[nodiscard]] nlohmann::json plan_to_json(const OpenLoopPlan& plan, const std::string& policy_name);
[[nodiscard]] OpenLoopPlan plan_from_json(const nlohmann::json& j);

class RandomPolicy final : public Policy {
 public:
  Action act(const Belief& belief, const ProblemConfig& config, Rng& rng) override {
    return random_policy(belief.observed, config, rng);
  }
};

class GreedyPolicy final : public Policy {
 public:
  Action act(const Belief& belief, const ProblemConfig& config, Rng&) override {
    return greedy_policy(belief.mean, belief.observed, config);
  }
};

class ImportOnlyPolicy final : public Policy {
 public:
  Action act(const Belief& belief, const ProblemConfig& config, Rng&) override {
    return import_only_policy(belief.mean, belief.observed, config);
  }
};

/// Replays a fixed plan; DO_NOTHING past its end.
class OpenLoopPolicy final : public Policy {
 public:
  explicit OpenLoopPolicy(std::shared_ptr<const OpenLoopPlan> plan) : plan_(std::move(plan)) {}
  Action act(const Belief& belief, const ProblemConfig& config, Rng& rng) override;

 private:
  std::shared_ptr<const OpenLoopPlan> plan_;
};

}  // namespace mineral
