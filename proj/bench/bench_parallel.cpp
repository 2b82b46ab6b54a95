// Serial reference vs OpenMP kernels: the open-loop backward induction over
// scenarios and the paired-seed policy comparison.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "mineral/config_io.hpp"
#include "mineral/harness.hpp"
#include "mineral/policies.hpp"

namespace mineral {
namespace {

const ProblemConfig& config() {
  static const ProblemConfig c = table1_default().problem;
  return c;
}

std::vector<PlanScenario> scenarios(int n) {
  Rng rng(2024);
  return draw_plan_scenarios(default_prior(config()), config(), n, rng);
}

void BM_OpenLoop(benchmark::State& state, Execution exec) {
  const auto sc = scenarios(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_open_loop(config(), sc, exec).objective);
  state.counters["threads"] = exec == Execution::Serial ? 1 : omp_get_max_threads();
}

void BM_Compare(benchmark::State& state, Execution exec) {
  const Scenario sc = inaccurate_scenario(config());
  PolicyOptions opts;
  opts.planner.iterations = 100;
  opts.planner.scenarios = 10;
  opts.saa_scenarios = 20;
  std::vector<PolicyFactory> fs;
  for (const char* name : {"greedy", "import-only", "stochastic", "despot"})
    fs.push_back(make_policy(name, sc.config, opts, sc.initial_belief()));
  const int seeds = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compare_policies(sc, fs, seeds, 0, exec).rows.size());
  state.counters["episodes"] = static_cast<double>(fs.size()) * seeds;
}

BENCHMARK_CAPTURE(BM_OpenLoop, serial, Execution::Serial)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_OpenLoop, parallel, Execution::Parallel)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Compare, serial, Execution::Serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Compare, parallel, Execution::Parallel)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mineral

BENCHMARK_MAIN();
