#pragma once

#include <cstdint>
#include <random>

namespace mineral {

using Rng = std::mt19937_64;

/// Named noise streams. World noise for (stream, site, step) is a pure function
/// of the episode seed, so two policies that reach the same (site, step) with
/// the same operating flag see the same draw.
enum class Stream : std::uint64_t {
  Demand = 1,
  Yield = 2,
  Loss = 3,
  Observation = 4,
  Policy = 5,
  Scenario = 6,
  Truth = 7,
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
/// Maps 64 random bits to the open interval (0, 1).
[[nodiscard]] double unit_uniform(std::uint64_t bits);
[[nodiscard]] double uniform01(Rng& rng);
[[nodiscard]] double standard_normal(Rng& rng);

/// Source of the standard-normal / uniform variates consumed by one step.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual double yield_z(int site, int t) = 0;
  virtual double loss_z(int site, int t) = 0;
  virtual double obs_z(int site, int t) = 0;
  /// Uniform(0,1) variate for the demand of 1-based `year`.
  virtual double demand_u(int year) = 0;
};

/// Counter-based noise keyed by (seed, stream, site, t). Used for the world
/// in episodes and for determinized planner scenarios.
class CounterNoise final : public NoiseSource {
 public:
  explicit CounterNoise(std::uint64_t seed) : seed_(seed) {}
  double yield_z(int site, int t) override { return normal(Stream::Yield, site, t); }
  double loss_z(int site, int t) override { return normal(Stream::Loss, site, t); }
  double obs_z(int site, int t) override { return normal(Stream::Observation, site, t); }
  double demand_u(int year) override;
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  [[nodiscard]] double normal(Stream s, int site, int t) const;
  std::uint64_t seed_;
};

/// Fresh draws from a sequential engine; used by sampling-based search.
class StreamNoise final : public NoiseSource {
 public:
  explicit StreamNoise(Rng& rng) : rng_(&rng) {}
  double yield_z(int, int) override { return standard_normal(*rng_); }
  double loss_z(int, int) override { return standard_normal(*rng_); }
  double obs_z(int, int) override { return standard_normal(*rng_); }
  double demand_u(int) override { return uniform01(*rng_); }

 private:
  Rng* rng_;
};

/// Every variate at its mean: the certainty-equivalent model.
class MeanNoise final : public NoiseSource {
 public:
  double yield_z(int, int) override { return 0.0; }
  double loss_z(int, int) override { return 0.0; }
  double obs_z(int, int) override { return 0.0; }
  double demand_u(int) override { return 0.5; }
};

}  // namespace mineral
