#include "mineral/belief.hpp"

#include <algorithm>
#include <cmath>

namespace mineral {

Belief make_belief(const SiteVec<double>& mean, const SiteVec<double>& std, const Observables& observed) {
  if (mean.size() != std.size()) throw ContractViolation("belief mean/std size mismatch");
  for (double s : std)
    if (!(s >= 0.0)) throw ContractViolation("belief std must be >= 0");
  return Belief{mean, std, observed};
}

Belief default_prior(const ProblemConfig& config) {
  const std::size_t n = config.n_sites();
  SiteVec<double> mean(n), std(n, config.initial_belief_std);
  for (std::size_t j = 0; j < n; ++j) mean[j] = config.sites[j].initial_reserve;
  return make_belief(mean, std, initial_observables(n));
}

double kalman_gain(double sigma, double sigma_o) {
  const double prior = sigma * sigma;
  const double denom = prior + sigma_o * sigma_o;
  return denom > 0.0 ? prior / denom : 0.0;
}

Belief update(const Belief& belief, Action action, const Observation& observation,
              const Observables& next_observed, const ProblemConfig& config) {
  if (observation.measurement.has_value() != (action.kind == ActionKind::Explore))
    throw ContractViolation("measurement present iff the action is EXPLORE");
  Belief next = belief;
  if (observation.measurement) {
    const Measurement& m = *observation.measurement;
    if (m.site != action.site) throw ContractViolation("measurement for a site that was not explored");
    const auto j = static_cast<std::size_t>(m.site);
    const double gain = kalman_gain(belief.std[j], config.obs_noise);
    next.mean[j] = belief.mean[j] + gain * (m.value - belief.mean[j]);
    next.std[j] = std::sqrt((1.0 - gain) * belief.std[j] * belief.std[j]);
  }
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    if (belief.observed.operating[j])
      next.mean[j] = std::max(0.0, next.mean[j] - config.sites[j].yield.mean);
  }
  next.observed = next_observed;
  return next;
}

double repeated_update_variance(double sigma0, double sigma_o, int k) {
  if (k < 0) throw ContractViolation("update count must be >= 0");
  const double s0 = sigma0 * sigma0;
  const double so = sigma_o * sigma_o;
  const double denom = so + k * s0;
  return denom > 0.0 ? s0 * so / denom : 0.0;
}

State sample_state(const Belief& belief, const ProblemConfig& config, Rng& rng) {
  State s{SiteVec<double>(belief.mean.size()), belief.observed};
  for (std::size_t j = 0; j < belief.mean.size(); ++j) {
    const double draw = belief.std[j] > 0.0 ? belief.mean[j] + belief.std[j] * standard_normal(rng) : belief.mean[j];
    s.reserves[j] = std::max(0.0, round_to_bin(draw, config.reserve_bin));
  }
  return s;
}

}  // namespace mineral
