#pragma once

#include <cstdint>
#include <string>

namespace mineral {

/// Greedy: the greedy baseline on the particle's reserves. Random: uniform
/// valid actions. Demand: builds only to cover a projected shortfall against
/// the next year's demand band and restores only when that pays.
enum class RolloutKind : std::uint8_t { Greedy, Random, Demand };

[[nodiscard]] std::string to_string(RolloutKind kind);
[[nodiscard]] RolloutKind parse_rollout_kind(const std::string& text);

/// Search budget and shape for the online planners.
struct PlannerConfig {
  int iterations = 2000;     // simulations (POMCPOW) or scenario-expansions (DESPOT) per decision
  int max_depth = 15;        // tree depth; rollouts continue to the horizon below it
  double ucb_c = 100.0;
  double k_obs = 4.0;        // observation widening: |children| <= k_obs * N^alpha_obs
  double alpha_obs = 0.1;
  int scenarios = 50;        // K determinized scenarios (DESPOT)
  RolloutKind rollout = RolloutKind::Demand;
  std::uint64_t seed = 0;    // mixed into every decision's search engine
};

/// Everything a policy factory may need beyond the problem itself.
struct PolicyOptions {
  PlannerConfig planner;
  int saa_scenarios = 100;       // N for the stochastic open-loop baseline
  std::uint64_t saa_seed = 2024; // scenario draw for the stochastic baseline
};

}  // namespace mineral
