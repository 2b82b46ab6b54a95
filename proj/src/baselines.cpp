#include "mineral/baselines.hpp"

#include <algorithm>

#include "mineral/dynamics.hpp"

namespace mineral {

Action random_policy(const Observables& observed, const ProblemConfig& config, Rng& rng) {
  const auto actions = valid_actions(observed, config);
  const auto k = std::min(actions.size() - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(actions.size())));
  return actions[k];
}

namespace {

// Largest positive estimate among unbuilt sites that pass `eligible`; lowest index on ties.
template <typename Eligible>
std::optional<int> largest_unbuilt(const SiteVec<double>& estimates, const Observables& observed,
                                   const ProblemConfig& config, Eligible eligible) {
  std::optional<int> best;
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    if (observed.ever_built[j] || observed.operating[j] || !eligible(j)) continue;
    if (!(estimates[j] > 0.0)) continue;
    if (!best || estimates[j] > estimates[static_cast<std::size_t>(*best)]) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace

Action greedy_policy(const SiteVec<double>& estimates, const Observables& observed, const ProblemConfig& config) {
  for (std::size_t j = 0; j < config.n_sites(); ++j)
    if (observed.operating[j] && estimates[j] <= 0.0) return Action::restore(static_cast<int>(j));
  const bool domestic_ok = observed.t >= config.delay_goal;
  if (auto j = largest_unbuilt(estimates, observed, config,
                               [&](std::size_t k) { return domestic_ok || !config.sites[k].domestic; }))
    return Action::build(*j);
  return Action::do_nothing();
}

Action import_only_policy(const SiteVec<double>& estimates, const Observables& observed, const ProblemConfig& config) {
  if (auto j = largest_unbuilt(estimates, observed, config, [&](std::size_t k) { return !config.sites[k].domestic; }))
    return Action::build(*j);
  return Action::do_nothing();
}

Action OpenLoopPolicy::act(const Belief& belief, const ProblemConfig& config, Rng&) {
  const auto t = static_cast<std::size_t>(belief.observed.t);
  if (t >= plan_->actions.size()) return Action::do_nothing();
  const Action a = plan_->actions[t];
  return is_valid_action(a, belief.observed, config) ? a : Action::do_nothing();
}

std::vector<Action> induced_plan(Policy& policy, const SiteVec<double>& estimates, const ProblemConfig& config) {
  MeanNoise noise;
  Rng rng(0);
  State state = initial_state(config, estimates);
  Belief belief = make_belief(estimates, SiteVec<double>(estimates.size(), 0.0), state.observed);
  std::vector<Action> out;
  while (!is_terminal(state.observed, config)) {
    const Action a = policy.act(belief, config, rng);
    const StepOutcome o = step(state, a, config, noise);
    belief = update(belief, a, o.observation, o.next_state.observed, config);
    state = o.next_state;
    out.push_back(a);
  }
  return out;
}

nlohmann::json plan_to_json(const OpenLoopPlan& plan, const std::string& policy_name) {
  nlohmann::json j;
  j["policy"] = policy_name;
  j["objective"] = plan.objective;
  auto& years = j["actions"] = nlohmann::json::array();
  for (std::size_t t = 0; t < plan.actions.size(); ++t)
    years.push_back({{"t", t}, {"action", to_string(plan.actions[t])}});
  return j;
}

OpenLoopPlan plan_from_json(const nlohmann::json& j) {
  OpenLoopPlan plan;
  plan.objective = j.value("objective", 0.0);
  const auto& years = j.at("actions");
  plan.actions.assign(years.size(), Action::do_nothing());
  for (const auto& entry : years) {
    const auto t = entry.at("t").get<std::size_t>();
    if (t >= plan.actions.size()) throw ConfigError("plan entry t=" + std::to_string(t) + " out of range");
    plan.actions[t] = parse_action(entry.at("action").get<std::string>());
  }
  return plan;
}

}  // namespace mineral
