#include "mineral/policies.hpp"

#include <memory>

#include "mineral/baselines.hpp"

namespace mineral {

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"random",     "greedy",  "import-only", "deterministic",
                                              "stochastic", "pomcpow", "despot"};
  return names;
}

PolicyFactory make_policy(const std::string& name, const ProblemConfig& config, const PolicyOptions& options,
                          const Belief& initial, SearchTraceSink sink) {
  if (name == "random") return {name, [] { return std::make_unique<RandomPolicy>(); }};
  if (name == "greedy") return {name, [] { return std::make_unique<GreedyPolicy>(); }};
  if (name == "import-only") return {name, [] { return std::make_unique<ImportOnlyPolicy>(); }};
  if (name == "deterministic" || name == "stochastic") {
    std::shared_ptr<const OpenLoopPlan> plan;
    if (name == "deterministic") {
      plan = std::make_shared<const OpenLoopPlan>(plan_open_loop_deterministic(initial.mean, config));
    } else {
      Rng rng(options.saa_seed);
      plan = std::make_shared<const OpenLoopPlan>(
          plan_open_loop_stochastic(initial, config, options.saa_scenarios, rng));
    }
    return {name, [plan] { return std::make_unique<OpenLoopPolicy>(plan); }};
  }
  if (name == "pomcpow" || name == "despot") {
    check_planner_config(options.planner);
    const PlannerConfig pc = options.planner;
    if (name == "pomcpow") return {name, [pc, sink] { return std::make_unique<PomcpowPolicy>(pc, sink); }};
    return {name, [pc, sink] { return std::make_unique<DespotPolicy>(pc, sink); }};
  }
  std::string valid;
  for (const auto& n : policy_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown policy '" + name + "' (valid: " + valid + ")");
}

}  // namespace mineral
