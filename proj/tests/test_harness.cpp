#include <gtest/gtest.h>

#include <cmath>

#include "mineral/config_io.hpp"
#include "mineral/harness.hpp"
#include "mineral/policies.hpp"

namespace mineral {
namespace {

ProblemConfig table1() { return table1_default().problem; }

PolicyFactory factory(const std::string& name, const Scenario& sc) {
  PolicyOptions opts;
  opts.planner.iterations = 40;
  opts.planner.scenarios = 5;
  opts.planner.max_depth = 3;
  opts.saa_scenarios = 10;
  return make_policy(name, sc.config, opts, sc.initial_belief());
}

TEST(DiscountedReturn, GeometricSeries) {
  const std::vector<double> ones(30, 1.0);
  EXPECT_NEAR(discounted_return(ones, 0.97), (1.0 - std::pow(0.97, 30)) / 0.03, 1e-12);
  EXPECT_NEAR(discounted_return(ones, 0.97), 19.966, 5e-4);  // 0.97^30 = 0.40101
  EXPECT_EQ(discounted_return(std::vector<double>{4.0, 9.0, 9.0}, 0.0), 4.0);
  EXPECT_EQ(discounted_return(std::vector<double>(30, 0.0), 0.97), 0.0);
  EXPECT_EQ(discounted_return(std::vector<double>{}, 0.97), 0.0);
}

TEST(Scenarios, AccurateTruthLiesInsideTheInterval) {
  const ProblemConfig c = table1();
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Scenario sc = accurate_scenario(c, seed);
    EXPECT_EQ(sc.label, ScenarioLabel::Accurate);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LE(std::abs(sc.true_reserves[j] - sc.prior_mean[j]), 1.96 * sc.prior_std[j] + c.reserve_bin / 2) << seed;
      EXPECT_EQ(std::fmod(sc.true_reserves[j], c.reserve_bin), 0.0);
      EXPECT_GE(sc.true_reserves[j], 0.0);
    }
  }
}

TEST(Scenarios, InaccurateTruthIsFourSigmaOut) {
  const ProblemConfig c = table1();
  const Scenario sc = inaccurate_scenario(c);
  EXPECT_EQ(sc.true_reserves, (SiteVec<double>{140000.0, 10000.0, 140000.0, 10000.0}));
  const int signs[] = {-1, -1, 1, 1};
  const Scenario flipped = inaccurate_scenario(c, signs);
  EXPECT_EQ(flipped.true_reserves, (SiteVec<double>{60000.0, 10000.0, 140000.0, 90000.0}));
  for (const Scenario* s : {&sc, &flipped}) {
    bool far = false;
    for (std::size_t j = 0; j < 4; ++j) far |= std::abs(s->true_reserves[j] - s->prior_mean[j]) >= 3.0 * s->prior_std[j];
    EXPECT_TRUE(far);
  }
  const Belief b = sc.initial_belief();
  EXPECT_EQ(b.mean, sc.prior_mean);
  EXPECT_EQ(b.std, sc.prior_std);
}

TEST(RunEpisode, ZeroWeightsEarnNothing) {
  ProblemConfig c = table1();
  c.weights = {};
  const Scenario sc = accurate_scenario(c, 1);
  auto p = factory("random", sc).create();
  EXPECT_EQ(run_episode(sc, *p, 4).metrics.discounted_reward, 0.0);
}

TEST(RunEpisode, ImportOnlyNeverMinesDomestically) {
  const Scenario sc = accurate_scenario(table1(), 0);
  auto p = factory("import-only", sc).create();
  for (std::uint64_t seed = 0; seed < 5; ++seed) EXPECT_FALSE(run_episode(sc, *p, seed).metrics.first_domestic_build);
}

TEST(RunEpisode, RepeatRunsAreIdentical) {
  const Scenario sc = inaccurate_scenario(table1());
  for (const std::string& name : policy_names()) {
    const PolicyFactory f = factory(name, sc);
    auto a = f.create();
    auto b = f.create();
    const EpisodeTrace x = run_episode(sc, *a, 7, name);
    const EpisodeTrace y = run_episode(sc, *b, 7, name);
    ASSERT_EQ(x.steps.size(), y.steps.size()) << name;
    for (std::size_t t = 0; t < x.steps.size(); ++t) {
      EXPECT_EQ(x.steps[t].action, y.steps[t].action) << name;
      EXPECT_EQ(x.steps[t].outcome.next_state, y.steps[t].outcome.next_state) << name;
      EXPECT_EQ(x.steps[t].outcome.reward.total, y.steps[t].outcome.reward.total) << name;
    }
    EXPECT_EQ(x.beliefs, y.beliefs) << name;
    EXPECT_EQ(x.metrics, y.metrics) << name;
  }
}

TEST(RunEpisode, MetricsRecomputeExactly) {
  const Scenario sc = accurate_scenario(table1(), 2);
  for (const std::string& name : policy_names()) {
    auto p = factory(name, sc).create();
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const EpisodeTrace tr = run_episode(sc, *p, seed, name);
      EXPECT_EQ(metrics_from_trace(tr, sc.config), tr.metrics) << name;
      EXPECT_GE(tr.metrics.unfulfilled_pct, 0.0);
      EXPECT_LE(tr.metrics.unfulfilled_pct, 100.0);
      EXPECT_EQ(tr.beliefs.size(), tr.steps.size() + 1);
    }
  }
}

// Independent accumulation of the reported metrics from the step records.
TEST(RunEpisode, MetricsFollowTheirDefinitions) {
  const Scenario sc = accurate_scenario(table1(), 0);
  auto p = factory("greedy", sc).create();
  const EpisodeTrace tr = run_episode(sc, *p, 3);
  double processed = 0, co2 = 0, demand = 0, unmet = 0, profit = 0, disc = 0, g = 1;
  std::optional<int> first;
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    const auto& s = tr.steps[t];
    processed += sc.config.extraction_factor * s.outcome.feed;
    co2 += s.outcome.reward.r2_emissions;
    demand += s.outcome.demand;
    unmet += s.outcome.reward.r3_unfulfilled;
    profit += s.outcome.reward.r4_profit;
    disc += g * s.outcome.reward.total;
    g *= sc.config.discount;
    if (!first && s.action.kind == ActionKind::Build && sc.config.sites[static_cast<std::size_t>(s.action.site)].domestic)
      first = static_cast<int>(t);
  }
  const EpisodeMetrics& m = tr.metrics;
  EXPECT_NEAR(m.processed, processed, 1e-9 * processed);
  EXPECT_NEAR(m.co2, co2, 1e-9 * std::abs(co2) + 1e-12);
  EXPECT_EQ(m.demand, demand);
  EXPECT_NEAR(m.unfulfilled, unmet, 1e-9 * unmet + 1e-12);
  EXPECT_NEAR(m.unfulfilled_pct, 100.0 * unmet / demand, 1e-9);
  EXPECT_NEAR(m.profit, profit, 1e-9 * std::abs(profit));
  EXPECT_NEAR(m.discounted_reward, disc, 1e-9 * std::abs(disc));
  EXPECT_EQ(m.first_domestic_build, first);
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(*first, sc.config.delay_goal);
}

// Different policies under one seed face the same demand, and the same draws
// wherever they operate the same site in the same year.
TEST(ComparePolicies, WorldNoiseIsPairedAcrossPolicies) {
  const Scenario sc = inaccurate_scenario(table1());
  auto random = factory("random", sc).create();
  auto greedy = factory("greedy", sc).create();
  auto imports = factory("import-only", sc).create();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EpisodeTrace a = run_episode(sc, *random, seed);
    const EpisodeTrace b = run_episode(sc, *greedy, seed);
    const EpisodeTrace c = run_episode(sc, *imports, seed);
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
      EXPECT_EQ(a.steps[t].outcome.demand, b.steps[t].outcome.demand);
      EXPECT_EQ(b.steps[t].outcome.demand, c.steps[t].outcome.demand);
      for (std::size_t j = 0; j < 4; ++j) {
        const bool both = b.beliefs[t].observed.operating[j] && c.beliefs[t].observed.operating[j];
        // A reserve-clamped extraction leaves nothing behind; skip those.
        const bool unclamped =
            b.steps[t].outcome.next_state.reserves[j] > 0 && c.steps[t].outcome.next_state.reserves[j] > 0;
        if (both && unclamped) {
          EXPECT_EQ(b.steps[t].outcome.extracted[j], c.steps[t].outcome.extracted[j]);
          EXPECT_EQ(b.steps[t].outcome.lost[j], c.steps[t].outcome.lost[j]);
        }
      }
    }
  }
}

TEST(ComparePolicies, IdenticalPoliciesGiveIdenticalRows) {
  const Scenario sc = accurate_scenario(table1(), 0);
  PolicyFactory a = factory("greedy", sc), b = factory("greedy", sc);
  b.name = "greedy-copy";
  const std::vector<PolicyFactory> fs{a, b};
  const Comparison cmp = compare_policies(sc, fs, 4);
  ASSERT_EQ(cmp.rows.size(), 2u);
  const PolicySummary& x = cmp.rows[0];
  const PolicySummary& y = cmp.rows[1];
  EXPECT_EQ(x.policy, "greedy");
  EXPECT_EQ(y.policy, "greedy-copy");
  EXPECT_EQ(x.processed.mean, y.processed.mean);
  EXPECT_EQ(x.discounted_reward.mean, y.discounted_reward.mean);
  EXPECT_EQ(x.discounted_reward.std, y.discounted_reward.std);
  EXPECT_EQ(x.first_domestic_build.mean, y.first_domestic_build.mean);
}

TEST(ComparePolicies, SerialAndParallelAgree) {
  const Scenario sc = inaccurate_scenario(table1());
  std::vector<PolicyFactory> fs;
  for (const std::string& name : policy_names()) fs.push_back(factory(name, sc));
  const Comparison s = compare_policies(sc, fs, 3, 10, Execution::Serial);
  const Comparison p = compare_policies(sc, fs, 3, 10, Execution::Parallel);
  ASSERT_EQ(s.episodes.size(), p.episodes.size());
  for (std::size_t k = 0; k < s.episodes.size(); ++k)
    for (std::size_t i = 0; i < s.episodes[k].size(); ++i) {
      EXPECT_EQ(s.episodes[k][i].metrics, p.episodes[k][i].metrics) << fs[k].name;
      EXPECT_EQ(s.episodes[k][i].beliefs, p.episodes[k][i].beliefs) << fs[k].name;
      EXPECT_EQ(s.episodes[k][i].seed, 10 + i);
    }
  for (std::size_t k = 0; k < s.rows.size(); ++k)
    EXPECT_EQ(s.rows[k].discounted_reward.mean, p.rows[k].discounted_reward.mean);
}

TEST(Summaries, StatsUseSampleStd) {
  const std::vector<double> xs{1.0, 2.0, 3.0, 10.0};
  const Stat s = summarize(xs);
  EXPECT_EQ(s.n, 4);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_NEAR(s.std, std::sqrt((9.0 + 4.0 + 1.0 + 36.0) / 3.0), 1e-12);
  EXPECT_EQ(summarize(std::vector<double>{5.0}).std, 0.0);
}

TEST(Summaries, NeverBuiltIsCountedSeparately) {
  EpisodeMetrics a, b, c;
  a.first_domestic_build = 10;
  c.first_domestic_build = 14;
  const std::vector<EpisodeMetrics> eps{a, b, c};
  const PolicySummary s = summarize("x", eps);
  EXPECT_EQ(s.seeds, 3);
  EXPECT_EQ(s.never_domestic, 1);
  EXPECT_EQ(s.first_domestic_build.n, 2);
  EXPECT_DOUBLE_EQ(s.first_domestic_build.mean, 12.0);
}

TEST(Scenarios, LabelsRoundTrip) {
  for (ScenarioLabel l : {ScenarioLabel::Accurate, ScenarioLabel::Inaccurate, ScenarioLabel::Custom})
    EXPECT_EQ(parse_scenario_label(to_string(l)), l);
  EXPECT_THROW((void)parse_scenario_label("optimistic"), ConfigError);
}

TEST(Policies, UnknownNameListsTheRegisteredOnes) {
  const Scenario sc = accurate_scenario(table1(), 0);
  try {
    (void)factory("oracle", sc);
    FAIL();
  } catch (const ConfigError& e) {
    for (const std::string& name : policy_names()) EXPECT_NE(std::string(e.what()).find(name), std::string::npos);
  }
  EXPECT_EQ(policy_names().size(), 7u);
}

}  // namespace
}  // namespace mineral
