#include <benchmark/benchmark.h>

#include "wrenchgrasp/cost.hpp"
#include "wrenchgrasp/harness.hpp"
#include "wrenchgrasp/scenario.hpp"
#include "wrenchgrasp/surrogate.hpp"

using namespace wrenchgrasp;

namespace {

Scenario hammer() { return load_scenario(std::string(WRENCHGRASP_SCENARIO_DIR) + "/hammer.json"); }

void BM_AnalyticCostPerCandidate(benchmark::State& state) {
  const Scenario s = hammer();
  const TrialSetup t = prepare_trial(s, 0);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& g = t.candidates[i++ % t.candidates.size()];
    benchmark::DoNotOptimize(analytic_cost(g, t.trajectory, s.contact, t.body, s.cost.weights));
  }
}
BENCHMARK(BM_AnalyticCostPerCandidate);

void BM_GeometryScore(benchmark::State& state) {
  const Scenario s = hammer();
  const TrialSetup t = prepare_trial(s, 0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry_score(t.candidates[i++ % t.candidates.size()], t.grasp_cloud));
  }
}
BENCHMARK(BM_GeometryScore);

void BM_AntipodalSampling(benchmark::State& state) {
  const Scenario s = hammer();
  const TrialSetup t = prepare_trial(s, 0);
  SamplerConfig cfg = s.sampler;
  cfg.count = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_antipodal(t.grasp_cloud, cfg, seed++));
}
BENCHMARK(BM_AntipodalSampling)->Arg(20)->Arg(100);

void BM_SurrogateForward(benchmark::State& state) {
  const MlpModel m = MlpModel::initialize({static_cast<int>(kFeatureCount), 64, 64, 3}, 1);
  const FeatureVector x = FeatureVector::Ones(kFeatureCount);
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x));
}
BENCHMARK(BM_SurrogateForward);

}  // namespace
