#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <omp.h>

#include "mineral/baselines.hpp"
#include "mineral/dynamics.hpp"

namespace mineral {
namespace {

// Per-site status digit inside a DP layer.
constexpr int kUnbuilt = 0;
constexpr int kClosed = 1;
constexpr int kBuiltBase = 2;  // kBuiltBase + b: operating since a BUILD at step b

constexpr std::size_t kMaxPlanStates = 200'000'000;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

std::unique_ptr<NoiseSource> noise_for(const PlanScenario& s) {
  if (s.noise_seed) return std::make_unique<CounterNoise>(*s.noise_seed);
  return std::make_unique<MeanNoise>();
}

// Everything the layer sweep needs, precomputed once per scenario set.
struct PlanTables {
  std::size_t n = 0, horizon = 0, scenarios = 0;
  std::vector<double> contrib;  // [((j*T + b)*T + t)*N + s]: delivered mass at t if built at b
  std::vector<double> separable;  // [(j*T + b)*T + t]: scenario-mean per-site reward terms
  std::vector<double> demand;     // [t*N + s]
  std::vector<double> build_value;    // [t*n + j]: weighted reward of BUILD(j) at t (excl. extraction)
  std::vector<double> restore_value;  // [j]

  const double* contrib_row(std::size_t j, std::size_t b, std::size_t t) const {
    return contrib.data() + ((j * horizon + b) * horizon + t) * scenarios;
  }
};

PlanTables build_tables(const ProblemConfig& config, std::span<const PlanScenario> scenarios) {
  PlanTables tb;
  tb.n = config.n_sites();
  tb.horizon = static_cast<std::size_t>(config.horizon);
  tb.scenarios = scenarios.size();
  const std::size_t n = tb.n, T = tb.horizon, N = tb.scenarios;
  const RewardWeights& w = config.weights;
  tb.contrib.assign(n * T * T * N, 0.0);
  tb.separable.assign(n * T * T, 0.0);
  tb.demand.assign(T * N, 0.0);

  for (std::size_t s = 0; s < N; ++s) {
    auto noise = noise_for(scenarios[s]);
    for (std::size_t t = 0; t < T; ++t) tb.demand[t * N + s] = demand_at(static_cast<int>(t) + 1, config, *noise);
    for (std::size_t j = 0; j < n; ++j) {
      const SiteModel& site = config.sites[j];
      const bool lossy = !site.domestic || config.apply_domestic_loss;
      for (std::size_t b = 0; b < T; ++b) {
        double remaining = scenarios[s].reserves[j];
        for (std::size_t t = b + 1; t < T; ++t) {
          const int si = static_cast<int>(j), ti = static_cast<int>(t);
          const double e = std::clamp(std::round(site.yield.mean + site.yield.std * noise->yield_z(si, ti)), 0.0, remaining);
          remaining -= e;
          double l = 0.0;
          if (lossy) l = std::clamp(std::round(site.loss.mean + site.loss.std * noise->loss_z(si, ti)), 0.0, e);
          const double z = delivered_mass(j, e, l, config);
          tb.contrib[((j * T + b) * T + t) * N + s] = z;
          const double sep = -w.emissions * config.emission_scale * site.emission_factor * e -
                             w.profit * (site.transport_cost + config.processing_cost) * z -
                             w.profit * config.operating_cost;
          tb.separable[(j * T + b) * T + t] += sep / static_cast<double>(N);
        }
      }
    }
  }

  tb.build_value.assign(T * n, 0.0);
  tb.restore_value.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < T; ++t) {
      double v = -w.profit * config.build_cost;
      if (config.sites[j].domestic && static_cast<int>(t) < config.delay_goal) v -= w.domestic * config.domestic_penalty;
      tb.build_value[t * n + j] = v;
    }
    tb.restore_value[j] = -w.profit * config.restore_cost + w.emissions * config.sites[j].restore_absorption;
  }
  return tb;
}

struct LayerView {
  std::size_t t = 0;
  std::size_t base = 0;       // t + 2
  std::size_t next_base = 0;  // t + 3
  std::vector<std::size_t> pow_cur, pow_next;
};

// One DP layer: V_t over [begin, end) given V_{t+1}. Writes value and argmax.
void sweep_layer(const ProblemConfig& config, const PlanTables& tb, const LayerView& lv,
                 const std::vector<double>& v_next, std::vector<double>& v_cur, std::vector<std::uint8_t>& choice,
                 std::size_t begin, std::size_t end, std::vector<double>& feed) {
  const std::size_t n = tb.n, N = tb.scenarios, t = lv.t;
  const double gamma = config.discount;
  const double rho = config.extraction_factor;
  const double w3 = config.weights.unfulfilled;
  const double w4p = config.weights.profit * config.lithium_price;
  const double inv_n = 1.0 / static_cast<double>(N);
  const double* demand = tb.demand.data() + t * N;
  const bool last = t + 1 == tb.horizon;

  std::array<int, kMaxSites> st{};
  std::array<const double*, kMaxSites> rows{};
  for (std::size_t idx = begin; idx < end; ++idx) {
    std::size_t rem = idx;
    int n_operating = 0, n_closed = 0;
    std::uint64_t used_builds = 0;
    bool reachable = true;
    for (std::size_t j = 0; j < n; ++j) {
      st[j] = static_cast<int>(rem % lv.base);
      rem /= lv.base;
      if (st[j] == kClosed) ++n_closed;
      if (st[j] >= kBuiltBase) {
        const auto bit = std::uint64_t{1} << (st[j] - kBuiltBase);
        if (used_builds & bit) reachable = false;
        used_builds |= bit;
        ++n_operating;
      }
    }
    if (!reachable || static_cast<std::size_t>(n_operating + 2 * n_closed) > t) {
      v_cur[idx] = 0.0;
      choice[idx] = 0;
      continue;
    }

    // Reward of this step that does not depend on the action.
    double value = 0.0;
    int k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (st[j] < kBuiltBase) continue;
      const auto b = static_cast<std::size_t>(st[j] - kBuiltBase);
      value += tb.separable[(j * tb.horizon + b) * tb.horizon + t];
      rows[static_cast<std::size_t>(k++)] = tb.contrib_row(j, b, t);
    }
    double coupled = 0.0;
    if (k == 0) {
      for (std::size_t s = 0; s < N; ++s) coupled += -w3 * demand[s];
    } else {
      std::copy(rows[0], rows[0] + N, feed.begin());
      for (int r = 1; r < k; ++r) {
        const double* row = rows[static_cast<std::size_t>(r)];
        for (std::size_t s = 0; s < N; ++s) feed[s] += row[s];
      }
      for (std::size_t s = 0; s < N; ++s) {
        const double processed = rho * feed[s];
        const double d = demand[s];
        coupled += -w3 * std::max(0.0, d - processed) + w4p * std::min(d, processed);
      }
    }
    value += coupled * inv_n;

    // Action choice against V_{t+1}.
    auto encode_next = [&](std::size_t changed, int new_status) {
      std::size_t out = 0;
      for (std::size_t j = 0; j < n; ++j)
        out += static_cast<std::size_t>(j == changed ? new_status : st[j]) * lv.pow_next[j];
      return out;
    };
    auto future = [&](std::size_t changed, int new_status) {
      return last ? 0.0 : gamma * v_next[encode_next(changed, new_status)];
    };
    double best = future(kMaxSites, 0);
    int best_action = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double cand;
      int action_index;
      if (st[j] == kUnbuilt) {
        cand = tb.build_value[t * n + j] + future(j, kBuiltBase + static_cast<int>(t));
        action_index = Action::build(static_cast<int>(j)).index();
      } else if (st[j] >= kBuiltBase) {
        cand = tb.restore_value[j] + future(j, kClosed);
        action_index = Action::restore(static_cast<int>(j)).index();
      } else {
        continue;
      }
      if (cand > best) {
        best = cand;
        best_action = action_index;
      }
    }
    v_cur[idx] = value + best;
    choice[idx] = static_cast<std::uint8_t>(best_action);
  }
}

}  // namespace

OpenLoopPlan solve_open_loop(const ProblemConfig& config, std::span<const PlanScenario> scenarios, Execution exec) {
  if (scenarios.empty()) throw ContractViolation("open-loop search needs at least one scenario");
  const std::size_t n = config.n_sites(), T = static_cast<std::size_t>(config.horizon);
  std::size_t total = 0;
  for (std::size_t t = 0; t < T; ++t) {
    total += ipow(t + 2, n);
    if (total > kMaxPlanStates) throw ConfigError("open-loop plan space too large for exact search");
  }
  const PlanTables tb = build_tables(config, scenarios);

  std::vector<std::vector<std::uint8_t>> choice(T);
  std::vector<double> v_next, v_cur;
  for (std::size_t tt = T; tt-- > 0;) {
    LayerView lv;
    lv.t = tt;
    lv.base = tt + 2;
    lv.next_base = tt + 3;
    for (std::size_t j = 0; j < n; ++j) {
      lv.pow_cur.push_back(ipow(lv.base, j));
      lv.pow_next.push_back(ipow(lv.next_base, j));
    }
    const std::size_t size = ipow(lv.base, n);
    v_cur.assign(size, 0.0);
    choice[tt].assign(size, 0);
    if (exec == Execution::Serial) {
      std::vector<double> feed(tb.scenarios);
      sweep_layer(config, tb, lv, v_next, v_cur, choice[tt], 0, size, feed);
    } else {
#pragma omp parallel
      {
        std::vector<double> feed(tb.scenarios);
        const auto threads = static_cast<std::size_t>(omp_get_num_threads());
        const auto id = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t chunk = (size + threads - 1) / threads;
        const std::size_t begin = std::min(size, id * chunk);
        const std::size_t end = std::min(size, begin + chunk);
        sweep_layer(config, tb, lv, v_next, v_cur, choice[tt], begin, end, feed);
      }
    }
    std::swap(v_next, v_cur);
  }

  OpenLoopPlan plan;
  plan.objective = v_next.at(0);
  std::array<int, kMaxSites> st{};
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) idx += static_cast<std::size_t>(st[j]) * ipow(t + 2, j);
    const Action a = Action::from_index(choice[t][idx]);
    plan.actions.push_back(a);
    if (a.kind == ActionKind::Build) st[static_cast<std::size_t>(a.site)] = kBuiltBase + static_cast<int>(t);
    if (a.kind == ActionKind::Restore) st[static_cast<std::size_t>(a.site)] = kClosed;
  }
  return plan;
}

OpenLoopPlan plan_open_loop_deterministic(const SiteVec<double>& estimates, const ProblemConfig& config,
                                          Execution exec) {
  const PlanScenario scenario{estimates, std::nullopt};
  return solve_open_loop(config, std::span(&scenario, 1), exec);
}

std::vector<PlanScenario> draw_plan_scenarios(const Belief& initial, const ProblemConfig& config, int n, Rng& rng) {
  if (n < 1) throw ContractViolation("scenario count must be >= 1");
  std::vector<PlanScenario> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const State s = sample_state(initial, config, rng);
    out.push_back({s.reserves, rng()});
  }
  return out;
}

OpenLoopPlan plan_open_loop_stochastic(const Belief& initial, const ProblemConfig& config, int n, Rng& rng,
                                       Execution exec) {
  const auto scenarios = draw_plan_scenarios(initial, config, n, rng);
  return solve_open_loop(config, scenarios, exec);
}

double evaluate_plan(std::span<const Action> actions, const ProblemConfig& config,
                     std::span<const PlanScenario> scenarios) {
  double total = 0.0;
  for (const PlanScenario& sc : scenarios) {
    auto noise = noise_for(sc);
    State s = initial_state(config, sc.reserves);
    double discount = 1.0, value = 0.0;
    for (std::size_t t = 0; t < static_cast<std::size_t>(config.horizon); ++t) {
      const Action a = t < actions.size() ? actions[t] : Action::do_nothing();
      const StepOutcome o = step(s, a, config, *noise);
      value += discount * o.reward.total;
      discount *= config.discount;
      s = o.next_state;
    }
    total += value;
  }
  return total / static_cast<double>(scenarios.size());
}

}  // namespace mineral
