#pragma once

#include "mineral/domain.hpp"
#include "mineral/noise.hpp"

namespace mineral {

/// Per-site extraction E_j and transport loss L_j for one step (Mt).
struct Extraction {
  SiteVec<double> extracted;
  SiteVec<double> lost;
};

/// Reward components for one step.
///
/// r1..r3 are non-negative penalty magnitudes (r2 may dip below zero through
/// restoration absorption) and r4 is signed profit. They enter the total as
///   total = w1*(-r1) + w2*(-r2) + w3*(-r3) + w4*r4.
struct RewardBreakdown {
  double r1_domestic_penalty = 0.0;
  double r2_emissions = 0.0;   // Mt CO2
  double r3_unfulfilled = 0.0; // Mt of demand not met
  double r4_profit = 0.0;      // $M
  double revenue = 0.0;
  double cost = 0.0;
  double total = 0.0;
};

struct StepOutcome {
  State next_state;
  Observation observation;
  RewardBreakdown reward;
  SiteVec<double> extracted;  // E
  SiteVec<double> lost;       // L
  SiteVec<double> delivered;  // Z (domestic: E, or E - L with apply_domestic_loss)
  double demand = 0.0;        // d_t
  double feed = 0.0;          // l_t
};

/// E_j = clamp(round(phi_j sample), 0, v_j) on operating sites; L_j likewise
/// clamped to [0, E_j] on operating foreign sites. Zero elsewhere.
[[nodiscard]] Extraction sample_extraction(const State& state, const ProblemConfig& config, NoiseSource& noise);

/// Deterministic part of the transition. Extraction uses the pre-action
/// operating flags; BUILD takes effect from the next step.
[[nodiscard]] State transition(const State& state, Action action, const Extraction& ex, const ProblemConfig& config);

/// Demand for 1-based `year`, uniform in its band and rounded to integer Mt.
/// Throws ConfigError when no band covers the year.
[[nodiscard]] double demand_at(int year, const ProblemConfig& config, NoiseSource& noise);

/// Mass delivered to the plant from site j given its extraction and loss.
[[nodiscard]] double delivered_mass(std::size_t j, double extracted, double lost, const ProblemConfig& config);

[[nodiscard]] RewardBreakdown reward(const State& state, Action action, const Extraction& ex, double demand,
                                     const ProblemConfig& config);

/// Weighted signed total from the four components.
[[nodiscard]] double weighted_total(const RewardBreakdown& r, const RewardWeights& w);

/// One full generative step. Throws ContractViolation for invalid actions or
/// when the episode is already over.
[[nodiscard]] StepOutcome step(const State& state, Action action, const ProblemConfig& config, NoiseSource& noise);

/// Probability of `observation` given the pre-step state and action: the
/// Gaussian reading N(v_j, sigma_o) rounded to integer Mt, clamped at 0 and
/// binned half-up. Non-EXPLORE actions produce the empty observation w.p. 1.
[[nodiscard]] double observation_likelihood(const Observation& observation, const State& state, Action action,
                                            const ProblemConfig& config);

}  // namespace mineral
