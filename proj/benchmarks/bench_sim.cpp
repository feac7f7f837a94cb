#include <benchmark/benchmark.h>

#include "wrenchgrasp/dynsim.hpp"
#include "wrenchgrasp/harness.hpp"
#include "wrenchgrasp/scenario.hpp"

using namespace wrenchgrasp;

namespace {

void BM_Rollout(benchmark::State& state) {
  const char* names[] = {"hammer", "knock", "sweep", "reach"};
  const Scenario s = load_scenario(std::string(WRENCHGRASP_SCENARIO_DIR) + "/" + names[state.range(0)] + ".json");
  const TrialSetup t = prepare_trial(s, 0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout(s.tool, t.body, t.candidates[i++ % t.candidates.size()], t.trajectory,
                                     s.contact, s.sim));
  }
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_Rollout)->DenseRange(0, 3);

void BM_TrialComparison(benchmark::State& state) {
  const Scenario s = load_scenario(std::string(WRENCHGRASP_SCENARIO_DIR) + "/hammer.json");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_comparison({s}, {Method::analytic, Method::geometry}, 1, nullptr, 1));
  }
}
BENCHMARK(BM_TrialComparison)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
