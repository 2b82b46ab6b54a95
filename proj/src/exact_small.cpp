#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mineral/dynamics.hpp"
#include "mineral/planners.hpp"

namespace mineral {
namespace {

constexpr std::size_t kMaxExactSites = 2;
constexpr int kMaxExactHorizon = 4;
constexpr std::size_t kMaxBins = 5;
constexpr double kMinProb = 1e-9;

struct Weighted {
  State state;
  double p = 0.0;
};

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-12; }

void refuse(const std::string& why) { throw ConfigError("exact solver refuses instance: " + why); }

void check_bounds(const ProblemConfig& config, const DiscretePrior& prior) {
  const std::size_t n = config.n_sites();
  if (n == 0 || n > kMaxExactSites) refuse("needs 1.." + std::to_string(kMaxExactSites) + " sites");
  if (config.horizon > kMaxExactHorizon) refuse("horizon > " + std::to_string(kMaxExactHorizon));
  if (prior.support.empty() || prior.support.size() != prior.prob.size()) refuse("malformed prior");
  for (std::size_t j = 0; j < n; ++j) {
    std::set<double> values;
    for (const auto& v : prior.support) {
      if (v.size() != n) refuse("prior support has the wrong number of sites");
      values.insert(v[j]);
    }
    if (values.size() > kMaxBins) refuse("more than 5 reserve values at a site");
    const SiteModel& s = config.sites[j];
    if (s.yield.std > 1e-3 || s.loss.std > 1e-3 || !is_integral(s.yield.mean) || !is_integral(s.loss.mean))
      refuse("yields and losses must be deterministic integers");
  }
  for (const DemandBand& b : config.demand)
    if (b.low != b.high) refuse("demand must be deterministic");
}

// Readings the explore action can return for reserve v, with probabilities.
std::vector<std::pair<Observation, double>> reading_distribution(const State& s, Action a, const ProblemConfig& config) {
  const double v = s.reserves[static_cast<std::size_t>(a.site)];
  const double bin = config.obs_bin;
  const double spread = 8.0 * config.obs_noise + bin;
  const auto k_lo = static_cast<long>(std::max(0.0, std::floor((v - spread) / bin)));
  const auto k_hi = static_cast<long>(std::ceil((v + spread) / bin));
  std::vector<std::pair<Observation, double>> out;
  for (long k = k_lo; k <= k_hi; ++k) {
    Observation o{config.n_sites(), Measurement{a.site, static_cast<double>(k) * bin}};
    const double p = observation_likelihood(o, s, a, config);
    if (p > kMinProb) out.emplace_back(o, p);
  }
  if (out.size() > kMaxBins) refuse("more than 5 observation bins per reserve value");
  return out;
}

class Expectimax {
 public:
  Expectimax(const ProblemConfig& config, const ExactOptions& options) : config_(config), options_(options) {}

  double value(const std::vector<Weighted>& belief) {
    if (is_terminal(belief.front().state.observed, config_)) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (Action a : actions(belief)) best = std::max(best, q(belief, a));
    return best;
  }

  std::vector<Action> actions(const std::vector<Weighted>& belief) const {
    std::vector<Action> out;
    for (Action a : valid_actions(belief.front().state.observed, config_))
      if (options_.allow_explore || a.kind != ActionKind::Explore) out.push_back(a);
    return out;
  }

  double q(const std::vector<Weighted>& belief, Action a) {
    MeanNoise noise;
    double immediate = 0.0;
    std::map<std::int64_t, std::vector<Weighted>> children;
    for (const Weighted& w : belief) {
      const StepOutcome out = step(w.state, a, config_, noise);
      immediate += w.p * out.reward.total;
      if (a.kind == ActionKind::Explore) {
        for (const auto& [obs, p] : reading_distribution(w.state, a, config_))
          children[obs.key()].push_back({out.next_state, w.p * p});
      } else {
        children[-1].push_back({out.next_state, w.p});
      }
    }
    double future = 0.0;
    for (auto& [key, child] : children) {
      double mass = 0.0;
      for (const Weighted& w : child) mass += w.p;
      if (mass <= 0.0) continue;
      for (Weighted& w : child) w.p /= mass;
      future += mass * value(child);
    }
    return immediate + config_.discount * future;
  }

 private:
  const ProblemConfig& config_;
  const ExactOptions& options_;
};

}  // namespace

ExactSolution solve_exact_small(const ProblemConfig& config, const DiscretePrior& prior, const ExactOptions& options) {
  check_bounds(config, prior);
  double mass = 0.0;
  std::vector<Weighted> belief;
  for (std::size_t i = 0; i < prior.support.size(); ++i) {
    if (!(prior.prob[i] >= 0.0)) refuse("negative prior probability");
    if (prior.prob[i] <= 0.0) continue;
    belief.push_back({initial_state(config, prior.support[i]), prior.prob[i]});
    mass += prior.prob[i];
  }
  if (belief.empty()) refuse("prior has no mass");
  for (Weighted& w : belief) w.p /= mass;

  ExactSolution sol;
  if (is_terminal(belief.front().state.observed, config)) return sol;
  Expectimax solver(config, options);
  sol.value = -std::numeric_limits<double>::infinity();
  for (Action a : solver.actions(belief)) {
    const double q = solver.q(belief, a);
    sol.root_q.emplace_back(a, q);
    sol.value = std::max(sol.value, q);
  }
  for (const auto& [a, q] : sol.root_q)
    if (q >= sol.value - 1e-9 * std::max(1.0, std::abs(sol.value))) sol.optimal.push_back(a);
  return sol;
}

Belief moment_belief(const DiscretePrior& prior, std::size_t n_sites) {
  SiteVec<double> mean(n_sites, 0.0), var(n_sites, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < prior.support.size(); ++i) {
    mass += prior.prob[i];
    for (std::size_t j = 0; j < n_sites; ++j) mean[j] += prior.prob[i] * prior.support[i][j];
  }
  for (std::size_t j = 0; j < n_sites; ++j) mean[j] /= mass;
  for (std::size_t i = 0; i < prior.support.size(); ++i)
    for (std::size_t j = 0; j < n_sites; ++j) {
      const double d = prior.support[i][j] - mean[j];
      var[j] += prior.prob[i] * d * d / mass;
    }
  SiteVec<double> std(n_sites);
  for (std::size_t j = 0; j < n_sites; ++j) std[j] = std::sqrt(var[j]);
  return make_belief(mean, std, initial_observables(n_sites));
}

}  // namespace mineral
