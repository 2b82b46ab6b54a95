#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mineral/config_io.hpp"
#include "mineral/harness.hpp"
#include "mineral/planners.hpp"
#include "tiny_instances.hpp"

namespace mineral {
namespace {

using testing::tiny_config;
using testing::tiny_instance;
using testing::tiny_planner;

// One foreign site with a known reserve; building at t = 0 pays back in year 2.
ProblemConfig build_toy() {
  ProblemConfig c = tiny_config(1, 2, 3.0);
  c.build_cost = 1.0;
  c.sites[0].initial_reserve = 6.0;
  return c;
}

Belief point_belief(const ProblemConfig& c) {
  SiteVec<double> mean(c.n_sites()), std(c.n_sites(), 0.0);
  for (std::size_t j = 0; j < c.n_sites(); ++j) mean[j] = c.sites[j].initial_reserve;
  return make_belief(mean, std, initial_observables(c.n_sites()));
}

TEST(Planners, BuildToyHasBuildAsUniqueOptimum) {
  const ProblemConfig c = build_toy();
  const DiscretePrior prior{{SiteVec<double>{6.0}}, {1.0}};
  const ExactSolution exact = solve_exact_small(c, prior);
  ASSERT_EQ(exact.optimal.size(), 1u);
  EXPECT_EQ(exact.optimal[0], Action::build(0));
}

TEST(Planners, PomcpowBuildsOnTheToy) {
  const ProblemConfig c = build_toy();
  const Belief b = point_belief(c);
  int builds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    builds += plan_pomcpow(b, c, tiny_planner(300), rng) == Action::build(0);
  }
  EXPECT_GE(builds, 95);
}

TEST(Planners, DespotBuildsOnTheToy) {
  const ProblemConfig c = build_toy();
  const Belief b = point_belief(c);
  PlannerConfig pc = tiny_planner(300);
  pc.scenarios = 20;
  int builds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    builds += plan_despot(b, c, pc, rng) == Action::build(0);
  }
  EXPECT_GE(builds, 95);
}

TEST(Planners, ZeroWeightsGiveZeroValues) {
  ProblemConfig c = table1_default().problem;
  c.weights = {};
  const Belief b = default_prior(c);
  PlannerConfig pc;
  pc.iterations = 100;
  pc.scenarios = 5;
  const auto sampler = [&](Rng& r) { return sample_state(b, c, r); };
  for (auto* search : {&search_pomcpow, &search_despot}) {
    Rng rng(3);
    const SearchResult r = search(b, sampler, c, pc, rng);
    EXPECT_TRUE(is_valid_action(r.action, b.observed, c));
    for (const RootActionStat& s : r.root) EXPECT_EQ(s.value, 0.0);
  }
}

TEST(Planners, SameSeedSameDecision) {
  const ProblemConfig c = table1_default().problem;
  const Belief b = default_prior(c);
  PlannerConfig pc;
  pc.iterations = 150;
  pc.scenarios = 10;
  const auto sampler = [&](Rng& r) { return sample_state(b, c, r); };
  for (auto* search : {&search_pomcpow, &search_despot}) {
    Rng r1(77), r2(77);
    const SearchResult a = search(b, sampler, c, pc, r1);
    const SearchResult z = search(b, sampler, c, pc, r2);
    EXPECT_EQ(a.action, z.action);
    EXPECT_EQ(a.value, z.value);
    ASSERT_EQ(a.root.size(), z.root.size());
    for (std::size_t i = 0; i < a.root.size(); ++i) {
      EXPECT_EQ(a.root[i].visits, z.root[i].visits);
      EXPECT_EQ(a.root[i].value, z.root[i].value);
    }
  }
}

TEST(Planners, PolicySeedVariesTheSearchOnly) {
  const ProblemConfig c = table1_default().problem;
  const Belief b = default_prior(c);
  PlannerConfig pc;
  pc.iterations = 100;
  std::vector<double> values;
  for (std::uint64_t s : {0u, 0u, 1u}) {
    pc.seed = s;
    PomcpowPolicy p(pc, [&](int, const SearchResult& r) { values.push_back(r.value); });
    Rng rng(5);
    (void)p.act(b, c, rng);
  }
  ASSERT_EQ(values.size(), 3u);
  EXPECT_EQ(values[0], values[1]);
  EXPECT_NE(values[0], values[2]);
}

TEST(Planners, DecisionsAreAlwaysValid) {
  const ProblemConfig c = table1_default().problem;
  PlannerConfig pc;
  pc.iterations = 60;
  pc.scenarios = 5;
  pc.max_depth = 4;
  PomcpowPolicy pom(pc);
  DespotPolicy despot(pc);
  const Scenario sc = inaccurate_scenario(c);
  for (Policy* p : std::initializer_list<Policy*>{&pom, &despot}) {
    const EpisodeTrace tr = run_episode(sc, *p, 11);
    ASSERT_EQ(tr.steps.size(), static_cast<std::size_t>(c.horizon));
    for (std::size_t t = 0; t < tr.steps.size(); ++t)
      EXPECT_TRUE(is_valid_action(tr.steps[t].action, tr.beliefs[t].observed, c));
  }
}

TEST(Planners, EmptyActionSetIsAContractViolation) {
  const ProblemConfig c = build_toy();
  Belief b = point_belief(c);
  b.observed.t = c.horizon;
  Rng rng(1);
  EXPECT_THROW((void)plan_pomcpow(b, c, tiny_planner(10), rng), ContractViolation);
  EXPECT_THROW((void)plan_despot(b, c, tiny_planner(10), rng), ContractViolation);
}

TEST(Planners, InvalidConfigIsRejected) {
  PlannerConfig pc;
  pc.alpha_obs = 1.0;
  EXPECT_THROW(check_planner_config(pc), ContractViolation);
  pc = {};
  pc.scenarios = 0;
  EXPECT_THROW(check_planner_config(pc), ContractViolation);
  pc = {};
  pc.iterations = 0;
  EXPECT_THROW(check_planner_config(pc), ContractViolation);
}

// With one scenario and a known reserve the problem is deterministic, so the
// determinized search must find an action the exact solver calls optimal.
TEST(Planners, SingleScenarioDespotIsExactOnDeterministicInstances) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto inst = tiny_instance(seed);
    const SiteVec<double> truth = inst.prior.support.back();
    const DiscretePrior point{{truth}, {1.0}};
    const ExactSolution exact = solve_exact_small(inst.config, point);
    Belief b = make_belief(truth, SiteVec<double>(truth.size(), 0.0), initial_observables(truth.size()));
    PlannerConfig pc = tiny_planner(2000);
    pc.scenarios = 1;
    Rng rng(seed);
    const SearchResult r = search_despot(b, [&](Rng&) { return initial_state(inst.config, truth); }, inst.config, pc, rng);
    EXPECT_NE(std::find(exact.optimal.begin(), exact.optimal.end(), r.action), exact.optimal.end()) << seed;
    EXPECT_NEAR(r.value, exact.value, 1e-6 * std::max(1.0, std::abs(exact.value))) << seed;
  }
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

TEST(Planners, OracleErrorShrinksWithBudget) {
  std::vector<std::vector<double>> pom(3), despot(3);
  const int budgets[] = {100, 1000, 10000};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto inst = tiny_instance(seed);
    const double exact = solve_exact_small(inst.config, inst.prior).value;
    const Belief b = moment_belief(inst.prior, inst.config.n_sites());
    const auto sampler = testing::discrete_sampler(inst);
    for (int k = 0; k < 3; ++k) {
      PlannerConfig pc = tiny_planner(budgets[k]);
      pc.scenarios = budgets[k] / 2;
      Rng r1(seed), r2(seed);
      pom[static_cast<std::size_t>(k)].push_back(std::abs(search_pomcpow(b, sampler, inst.config, pc, r1).value - exact));
      despot[static_cast<std::size_t>(k)].push_back(std::abs(search_despot(b, sampler, inst.config, pc, r2).value - exact));
    }
  }
  for (const auto* errs : {&pom, &despot}) {
    EXPECT_GE(median((*errs)[0]), median((*errs)[1]));
    EXPECT_GE(median((*errs)[1]), median((*errs)[2]));
  }
}

// The demand heuristic driven through the harness earns exactly what the
// planners' rollout reports for the same world noise.
class DemandHeuristicPolicy final : public Policy {
 public:
  Action act(const Belief& b, const ProblemConfig& c, Rng&) override { return demand_heuristic(b.mean, b.observed, c); }
};

TEST(Planners, RolloutDiscountingMatchesTheHarness) {
  const ProblemConfig c = table1_default().problem;
  const Scenario sc = accurate_scenario(c, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DemandHeuristicPolicy p;
    const EpisodeTrace tr = run_episode(sc, p, seed);
    CounterNoise noise(seed);
    Rng unused(0);
    const double r =
        rollout(initial_state(c, sc.true_reserves), sc.initial_belief(), c, RolloutKind::Demand, noise, unused);
    const double h = discounted_return(tr, c.discount);
    EXPECT_NEAR(r, h, 1e-9 * std::max(1.0, std::abs(h)));
  }
}

// Doubling domestic yield: the planner's median first domestic build stays
// within a year of the certainty-equivalent optimum for both yields.
TEST(Planners, DomesticBuildYearTracksTheOptimumUnderDoubledYield) {
  const ProblemConfig base = table1_default().problem;
  ProblemConfig doubled = base;
  for (auto& s : doubled.sites)
    if (s.domestic) s.yield.mean *= 2.0;
  PlannerConfig pc;
  pc.iterations = 200;
  pc.scenarios = 20;
  for (const ProblemConfig* c : std::initializer_list<const ProblemConfig*>{&base, &doubled}) {
    const Scenario sc = accurate_scenario(*c, 0);
    const OpenLoopPlan best = plan_open_loop_deterministic(sc.prior_mean, *c);
    double optimum = c->horizon;
    for (std::size_t t = 0; t < best.actions.size(); ++t) {
      const Action a = best.actions[t];
      if (a.kind == ActionKind::Build && c->sites[static_cast<std::size_t>(a.site)].domestic) {
        optimum = static_cast<double>(t);
        break;
      }
    }
    std::vector<double> years;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      DespotPolicy p(pc);
      const EpisodeTrace tr = run_episode(sc, p, seed);
      years.push_back(tr.metrics.first_domestic_build ? *tr.metrics.first_domestic_build : c->horizon);
    }
    EXPECT_LE(std::abs(median(years) - optimum), 1.0) << "domestic yield " << c->sites[0].yield.mean;
  }
}

}  // namespace
}  // namespace mineral
