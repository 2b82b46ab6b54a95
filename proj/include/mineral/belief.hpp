#pragma once

#include "mineral/domain.hpp"
#include "mineral/noise.hpp"

namespace mineral {

/// Independent per-site Gaussian over reserves plus the observed state components.
struct Belief {
  SiteVec<double> mean;  // mu_j, Mt
  SiteVec<double> std;   // sigma_j, Mt
  Observables observed;

  friend bool operator==(const Belief&, const Belief&) = default;
};

/// Prior with the given means and standard deviations and a fresh episode.
[[nodiscard]] Belief make_belief(const SiteVec<double>& mean, const SiteVec<double>& std,
                                 const Observables& observed);

/// Default prior: means at the configured initial reserves, common std.
[[nodiscard]] Belief default_prior(const ProblemConfig& config);

/// Kalman gain sigma^2 / (sigma^2 + sigma_o^2); 0 when both variances vanish.
[[nodiscard]] double kalman_gain(double sigma, double sigma_o);

/// Belief after taking `action` and receiving `observation`.
///
/// EXPLORE(j) applies a Kalman update to site j with the binned reading;
/// every other action leaves the Gaussians untouched. Sites that operated
/// during the step have their mean shifted down by the expected yield
/// (clamped at 0). Observed components are copied from `next_observed`.
[[nodiscard]] Belief update(const Belief& belief, Action action, const Observation& observation,
                            const Observables& next_observed, const ProblemConfig& config);

/// Variance after k EXPLORE updates with the same noise: s0^2 so^2 / (so^2 + k s0^2).
[[nodiscard]] double repeated_update_variance(double sigma0, double sigma_o, int k);

/// Draws reserves from N(mu_j, sigma_j^2), rounded to the reserve bin and
/// clamped at 0. Observed components are copied.
[[nodiscard]] State sample_state(const Belief& belief, const ProblemConfig& config, Rng& rng);

}  // namespace mineral
