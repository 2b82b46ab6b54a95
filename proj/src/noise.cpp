#include "mineral/noise.hpp"

#include <cmath>
#include <numbers>

namespace mineral {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(splitmix64(seed) ^ (salt * 0xD6E8FEB86659FD93ULL));
}

double unit_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double uniform01(Rng& rng) { return unit_uniform(rng()); }

namespace {
double box_muller(double u1, double u2) {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}
}  // namespace

double standard_normal(Rng& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return box_muller(u1, u2);
}

double CounterNoise::normal(Stream s, int site, int t) const {
  const std::uint64_t key =
      mix_seed(mix_seed(seed_, static_cast<std::uint64_t>(s)),
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(site)) << 32) |
                   static_cast<std::uint32_t>(t));
  return box_muller(unit_uniform(key), unit_uniform(splitmix64(key)));
}

double CounterNoise::demand_u(int year) {
  return unit_uniform(mix_seed(mix_seed(seed_, static_cast<std::uint64_t>(Stream::Demand)),
                               static_cast<std::uint32_t>(year)));
}

}  // namespace mineral
