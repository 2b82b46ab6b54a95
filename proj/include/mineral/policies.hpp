#pragma once

#include <string>
#include <vector>

#include "mineral/belief.hpp"
#include "mineral/planner_config.hpp"
#include "mineral/planners.hpp"
#include "mineral/policy.hpp"

namespace mineral {

/// Registered policy names, in display order.
[[nodiscard]] const std::vector<std::string>& policy_names();

/// Builds a factory for `name`. Open-loop plans are optimized here, once,
/// against `initial`; the stochastic baseline draws its scenarios from
/// options.saa_seed. Throws ConfigError for unknown names.
[[nodiscard]] PolicyFactory make_policy(const std::string& name, const ProblemConfig& config,
                                        const PolicyOptions& options, const Belief& initial,
                                        SearchTraceSink sink = {});

}  // namespace mineral
