#pragma once

#include <algorithm>
#include <vector>

#include "mineral/belief.hpp"
#include "mineral/domain.hpp"
#include "mineral/noise.hpp"
#include "mineral/planners.hpp"

namespace mineral::testing {

// Small instance within the exact solver's bounds: deterministic integer
// yields, constant demand, near-exact readings (<= 5 observation bins).
struct TinyInstance {
  ProblemConfig config;
  DiscretePrior prior;
};

inline SiteModel tiny_site(bool domestic, double yield, double loss) {
  SiteModel s;
  s.name = domestic ? "dom" : "for";
  s.domestic = domestic;
  s.yield = {yield, 1e-4};
  s.loss = {loss, 1e-4};
  s.emission_factor = 1.0;
  s.restore_absorption = 0.5;
  s.transport_cost = domestic ? 0.0 : 0.1;
  return s;
}

inline ProblemConfig tiny_config(std::size_t n_sites, int horizon, double demand) {
  ProblemConfig c;
  c.name = "tiny";
  for (std::size_t j = 0; j < n_sites; ++j) c.sites.push_back(tiny_site(j == 0 && n_sites > 1, 3.0, j == 0 ? 0.0 : 1.0));
  if (n_sites == 1) c.sites[0] = tiny_site(false, 3.0, 0.0);
  c.explore_cost = 0.5;
  c.build_cost = 4.0;
  c.restore_cost = 1.0;
  c.operating_cost = 0.5;
  c.processing_cost = 0.1;
  c.lithium_price = 2.0;
  c.extraction_factor = 1.0;
  c.discount = 0.95;
  c.horizon = horizon;
  c.delay_goal = 2;
  c.domestic_penalty = 2.0;
  c.weights = {1.0, 0.1, 1.0, 1.0};
  c.obs_noise = 0.3;
  c.reserve_bin = 1.0;
  c.obs_bin = 1.0;
  c.emission_scale = 1.0;
  c.initial_belief_std = 1.0;
  c.demand.push_back({1, horizon, demand, demand});
  for (auto& s : c.sites) s.initial_reserve = 6.0;
  return c;
}

// Deterministic family of instances indexed by `seed`.
inline TinyInstance tiny_instance(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7157));
  const std::size_t n = 1 + (seed % 2);
  const int horizon = 3 + static_cast<int>((seed / 2) % 2);
  const double demand = static_cast<double>(2 + rng() % 3);
  TinyInstance inst{tiny_config(n, horizon, demand), {}};
  inst.config.build_cost = static_cast<double>(2 + rng() % 5);
  inst.config.explore_cost = 0.25 * static_cast<double>(1 + rng() % 4);

  // Per site: two or three reserve levels from {0, 3, 6, 9} with random weights.
  const std::vector<double> levels{0.0, 3.0, 6.0, 9.0};
  std::vector<std::vector<std::pair<double, double>>> marginals(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> pick = levels;
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(2 + rng() % 2);
    std::sort(pick.begin(), pick.end());
    double total = 0.0;
    for (double v : pick) {
      const double w = 1.0 + static_cast<double>(rng() % 4);
      marginals[j].push_back({v, w});
      total += w;
    }
    for (auto& [v, w] : marginals[j]) w /= total;
  }
  if (n == 1) {
    for (const auto& [v, w] : marginals[0]) {
      inst.prior.support.push_back(SiteVec<double>{v});
      inst.prior.prob.push_back(w);
    }
  } else {
    for (const auto& [v0, w0] : marginals[0])
      for (const auto& [v1, w1] : marginals[1]) {
        inst.prior.support.push_back(SiteVec<double>{v0, v1});
        inst.prior.prob.push_back(w0 * w1);
      }
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (const auto& [v, w] : marginals[j]) mean += v * w;
    inst.config.sites[j].initial_reserve = mean;
  }
  return inst;
}

// Draws root states from the discrete prior.
inline StateSampler discrete_sampler(const TinyInstance& inst) {
  return [&inst](Rng& rng) {
    double u = uniform01(rng);
    std::size_t i = 0;
    for (; i + 1 < inst.prior.prob.size(); ++i) {
      if (u < inst.prior.prob[i]) break;
      u -= inst.prior.prob[i];
    }
    return initial_state(inst.config, inst.prior.support[i]);
  };
}

// Search budget suited to the tiny reward scale.
inline PlannerConfig tiny_planner(int iterations) {
  PlannerConfig pc;
  pc.iterations = iterations;
  pc.max_depth = 10;
  pc.ucb_c = 10.0;
  pc.k_obs = 10.0;
  pc.scenarios = 5000;
  return pc;
}

}  // namespace mineral::testing
