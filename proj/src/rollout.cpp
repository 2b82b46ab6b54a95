#include <algorithm>
#include <optional>
#include <stdexcept>

#include "mineral/baselines.hpp"
#include "mineral/dynamics.hpp"
#include "mineral/planners.hpp"

namespace mineral {

void check_planner_config(const PlannerConfig& pc) {
  if (pc.iterations < 1) throw ContractViolation("planner iterations must be >= 1");
  if (pc.max_depth < 1) throw ContractViolation("planner max_depth must be >= 1");
  if (pc.scenarios < 1) throw ContractViolation("planner scenarios must be >= 1");
  if (!(pc.alpha_obs >= 0.0 && pc.alpha_obs < 1.0)) throw ContractViolation("alpha_obs must lie in [0, 1)");
  if (!(pc.k_obs > 0.0)) throw ContractViolation("k_obs must be > 0");
  if (!(pc.ucb_c >= 0.0)) throw ContractViolation("ucb_c must be >= 0");
}

namespace {

double band_mid(int year, const ProblemConfig& config) {
  for (const DemandBand& b : config.demand)
    if (year >= b.from_year && year <= b.to_year) return 0.5 * (b.low + b.high);
  return 0.0;
}

// Expected delivered mass of site j in the step after next, given reserves v now.
double expected_delivery(std::size_t j, double v, bool operating_now, const ProblemConfig& config) {
  const SiteModel& s = config.sites[j];
  const double left = operating_now ? std::max(0.0, v - s.yield.mean) : v;
  const double e = std::min(s.yield.mean, left);
  const bool lossy = !s.domestic || config.apply_domestic_loss;
  return std::max(0.0, e - (lossy ? std::min(s.loss.mean, e) : 0.0));
}

}  // namespace

Action demand_heuristic(const SiteVec<double>& estimates, const Observables& obs, const ProblemConfig& config) {
  const int t = obs.t;
  const RewardWeights& w = config.weights;
  const int remaining = config.horizon - t - 1;  // steps after this one

  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    if (!obs.operating[j] || estimates[j] > 0.0) continue;
    double keep_cost = 0.0, discount = 1.0;
    for (int k = 0; k < remaining; ++k, discount *= config.discount) keep_cost += discount * config.operating_cost;
    const double gain = w.emissions * config.sites[j].restore_absorption + w.profit * keep_cost;
    if (gain > w.profit * config.restore_cost) return Action::restore(static_cast<int>(j));
  }

  // A site built now first produces in step t + 1, which serves year t + 2.
  if (remaining < 1) return Action::do_nothing();
  double supply = 0.0;
  for (std::size_t j = 0; j < config.n_sites(); ++j)
    if (obs.operating[j]) supply += expected_delivery(j, estimates[j], true, config);
  const double shortfall = band_mid(t + 2, config) - config.extraction_factor * supply;
  if (shortfall <= 0.0) return Action::do_nothing();

  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    if (obs.operating[j] || obs.ever_built[j] || !(estimates[j] > 0.0)) continue;
    if (config.sites[j].domestic && t < config.delay_goal) continue;
    if (!best || estimates[j] > estimates[*best]) best = j;
  }
  if (!best) return Action::do_nothing();
  const double added = config.extraction_factor * expected_delivery(*best, estimates[*best], false, config);
  const double years = std::min<double>(remaining, estimates[*best] / config.sites[*best].yield.mean);
  const double benefit = (w.unfulfilled + w.profit * config.lithium_price) * std::min(shortfall, added) * years;
  if (benefit <= w.profit * config.build_cost) return Action::do_nothing();
  return Action::build(static_cast<int>(*best));
}

double rollout(State state, Belief belief, const ProblemConfig& config, RolloutKind kind, NoiseSource& noise,
               Rng& rng) {
  double value = 0.0, discount = 1.0;
  while (!is_terminal(state.observed, config)) {
    Action a;
    switch (kind) {
      case RolloutKind::Greedy: a = greedy_policy(belief.mean, state.observed, config); break;
      case RolloutKind::Random: a = random_policy(state.observed, config, rng); break;
      case RolloutKind::Demand: a = demand_heuristic(belief.mean, state.observed, config); break;
    }
    StepOutcome o = step(state, a, config, noise);
    belief = update(belief, a, o.observation, o.next_state.observed, config);
    value += discount * o.reward.total;
    discount *= config.discount;
    state = std::move(o.next_state);
  }
  return value;
}

nlohmann::json to_json(const SearchResult& result) {
  nlohmann::json j;
  j["action"] = to_string(result.action);
  j["value"] = result.value;
  j["iterations"] = result.iterations;
  auto& root = j["root"] = nlohmann::json::array();
  for (const auto& s : result.root)
    root.push_back({{"action", to_string(s.action)}, {"visits", s.visits}, {"value", s.value}});
  return j;
}

}  // namespace mineral
