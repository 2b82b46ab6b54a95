#include "mineral/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mineral {

Extraction sample_extraction(const State& state, const ProblemConfig& config, NoiseSource& noise) {
  const std::size_t n = config.n_sites();
  Extraction ex{SiteVec<double>(n, 0.0), SiteVec<double>(n, 0.0)};
  const int t = state.observed.t;
  for (std::size_t j = 0; j < n; ++j) {
    if (!state.observed.operating[j]) continue;
    const SiteModel& s = config.sites[j];
    const int site = static_cast<int>(j);
    const double e = std::round(s.yield.mean + s.yield.std * noise.yield_z(site, t));
    ex.extracted[j] = std::clamp(e, 0.0, state.reserves[j]);
    if (!s.domestic || config.apply_domestic_loss) {
      const double l = std::round(s.loss.mean + s.loss.std * noise.loss_z(site, t));
      ex.lost[j] = std::clamp(l, 0.0, ex.extracted[j]);
    }
  }
  return ex;
}

double delivered_mass(std::size_t j, double extracted, double lost, const ProblemConfig& config) {
  const bool lossy = !config.sites[j].domestic || config.apply_domestic_loss;
  return std::max(0.0, lossy ? extracted - lost : extracted);
}

State transition(const State& state, Action action, const Extraction& ex, const ProblemConfig& config) {
  if (is_terminal(state.observed, config)) throw ContractViolation("episode is over");
  if (!is_valid_action(action, state.observed, config))
    throw ContractViolation("invalid action " + to_string(action) + " at t=" + std::to_string(state.observed.t));
  State next = state;
  for (std::size_t j = 0; j < config.n_sites(); ++j) {
    if (state.observed.operating[j]) next.reserves[j] = state.reserves[j] - ex.extracted[j];
    const double z = delivered_mass(j, ex.extracted[j], ex.lost[j], config);
    if (config.sites[j].domestic) next.observed.domestic += ex.extracted[j];
    else next.observed.imported += z;
  }
  if (action.kind == ActionKind::Build) {
    next.observed.operating[static_cast<std::size_t>(action.site)] = true;
    next.observed.ever_built[static_cast<std::size_t>(action.site)] = true;
  } else if (action.kind == ActionKind::Restore) {
    next.observed.operating[static_cast<std::size_t>(action.site)] = false;
  }
  next.observed.t = state.observed.t + 1;
  return next;
}

double demand_at(int year, const ProblemConfig& config, NoiseSource& noise) {
  for (const DemandBand& b : config.demand) {
    if (year >= b.from_year && year <= b.to_year)
      return std::round(b.low + (b.high - b.low) * noise.demand_u(year));
  }
  throw ConfigError("no demand band covers year " + std::to_string(year));
}

double weighted_total(const RewardBreakdown& r, const RewardWeights& w) {
  return w.domestic * (-r.r1_domestic_penalty) + w.emissions * (-r.r2_emissions) +
         w.unfulfilled * (-r.r3_unfulfilled) + w.profit * r.r4_profit;
}

RewardBreakdown reward(const State& state, Action action, const Extraction& ex, double demand,
                       const ProblemConfig& config) {
  RewardBreakdown r;
  const std::size_t n = config.n_sites();
  const bool has_site = action.kind != ActionKind::DoNothing;
  const auto j_act = static_cast<std::size_t>(std::max(action.site, 0));

  if (action.kind == ActionKind::Build && config.sites[j_act].domestic && state.observed.t < config.delay_goal)
    r.r1_domestic_penalty = config.domestic_penalty;

  double feed = 0.0;
  double transport_processing = 0.0;
  double emissions = 0.0;
  int operating = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double z = delivered_mass(j, ex.extracted[j], ex.lost[j], config);
    feed += z;
    transport_processing += (config.sites[j].transport_cost + config.processing_cost) * z;
    emissions += ex.extracted[j] * config.sites[j].emission_factor;
    operating += state.observed.operating[j] ? 1 : 0;
  }
  r.r2_emissions = emissions * config.emission_scale;
  if (has_site && action.kind == ActionKind::Restore) r.r2_emissions -= config.sites[j_act].restore_absorption;

  const double processed = config.extraction_factor * feed;
  r.r3_unfulfilled = std::max(0.0, demand - processed);
  r.revenue = std::min(demand, processed) * config.lithium_price;

  double cost = transport_processing + config.operating_cost * operating;
  switch (action.kind) {
    case ActionKind::Explore: cost += config.explore_cost; break;
    case ActionKind::Build: cost += config.build_cost; break;
    case ActionKind::Restore: cost += config.restore_cost; break;
    case ActionKind::DoNothing: break;
  }
  r.cost = cost;
  r.r4_profit = r.revenue - cost;
  r.total = weighted_total(r, config.weights);
  return r;
}

StepOutcome step(const State& state, Action action, const ProblemConfig& config, NoiseSource& noise) {
  if (is_terminal(state.observed, config)) throw ContractViolation("episode is over");
  if (!is_valid_action(action, state.observed, config))
    throw ContractViolation("invalid action " + to_string(action) + " at t=" + std::to_string(state.observed.t));

  const std::size_t n = config.n_sites();
  const int t = state.observed.t;
  StepOutcome out;
  Extraction ex = sample_extraction(state, config, noise);
  out.demand = demand_at(t + 1, config, noise);
  out.reward = reward(state, action, ex, out.demand, config);
  out.delivered = SiteVec<double>(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.delivered[j] = delivered_mass(j, ex.extracted[j], ex.lost[j], config);
    out.feed += out.delivered[j];
  }
  if (action.kind == ActionKind::Explore) {
    const auto j = static_cast<std::size_t>(action.site);
    const double raw = state.reserves[j] + config.obs_noise * noise.obs_z(action.site, t);
    out.observation = encode_observation(action.site, std::max(0.0, std::round(raw)), config);
  } else {
    out.observation = Observation::none(n);
  }
  out.next_state = transition(state, action, ex, config);
  out.extracted = ex.extracted;
  out.lost = ex.lost;
  return out;
}

namespace {
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
}  // namespace

double observation_likelihood(const Observation& observation, const State& state, Action action,
                              const ProblemConfig& config) {
  if (action.kind != ActionKind::Explore) return observation.measurement ? 0.0 : 1.0;
  if (!observation.measurement || observation.measurement->site != action.site) return 0.0;
  const double v = state.reserves[static_cast<std::size_t>(action.site)];
  const double bin = config.obs_bin;
  const double k = std::round(observation.measurement->value / bin);
  if (k < 0.0) return 0.0;
  if (config.obs_noise <= 0.0) {
    return round_to_bin(std::max(0.0, std::round(v)), bin) == k * bin ? 1.0 : 0.0;
  }
  // Integer readings n fall in bin k iff (k - 1/2) * bin <= n < (k + 1/2) * bin.
  const double lo_n = std::ceil((k - 0.5) * bin);
  const double hi_n = std::ceil((k + 0.5) * bin) - 1.0;
  if (hi_n < lo_n) return 0.0;
  const double s = config.obs_noise;
  const double upper = normal_cdf((hi_n + 0.5 - v) / s);
  // Bin 0 also absorbs every negative reading clamped to zero.
  const double lower = k <= 0.0 ? 0.0 : normal_cdf((lo_n - 0.5 - v) / s);
  return std::max(0.0, upper - lower);
}

}  // namespace mineral
