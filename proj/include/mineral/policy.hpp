#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mineral/belief.hpp"
#include "mineral/domain.hpp"
#include "mineral/noise.hpp"

namespace mineral {

/// A decision rule pi: B -> A. Instances may carry per-episode state (an
/// open-loop plan cursor, a planner's search scratch) and are owned by one
/// episode at a time.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const Belief& belief, const ProblemConfig& config, Rng& rng) = 0;
};

/// Named constructor for fresh Policy instances. Shared precomputation (open-loop
/// plans) happens once when the factory is built, never inside create().
struct PolicyFactory {
  std::string name;
  std::function<std::unique_ptr<Policy>()> create;
};

}  // namespace mineral
