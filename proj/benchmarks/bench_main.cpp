#include <benchmark/benchmark.h>

#include "cvverify/estimator.hpp"
#include "cvverify/homodyne.hpp"
#include "cvverify/injection.hpp"
#include "cvverify/protocol.hpp"
#include "cvverify/states.hpp"
#include "cvverify/witness.hpp"

using namespace cvv;

namespace {

const ResourceSpec kResource{0.1, 1.0, 1, 40};

void BM_CubicPhaseState(benchmark::State& state) {
  const ResourceSpec r{0.1, 1.0, 1, static_cast<int>(state.range(0)), 1e-6};
  for (auto _ : state) benchmark::DoNotOptimize(cubic_phase_state(r));
}
BENCHMARK(BM_CubicPhaseState)->Arg(24)->Arg(40);

void BM_FLowExact(benchmark::State& state) {
  const WitnessSpec w = build_witness(kResource);
  const DensityMatrix rho = DensityMatrix::pure(cubic_phase_state(kResource));
  for (auto _ : state) benchmark::DoNotOptimize(f_low_exact(rho, w));
}
BENCHMARK(BM_FLowExact);

void BM_SamplerConstruction(benchmark::State& state) {
  const DensityMatrix rho = DensityMatrix::pure(cubic_phase_state(kResource));
  for (auto _ : state) benchmark::DoNotOptimize(HomodyneSampler(rho));
}
BENCHMARK(BM_SamplerConstruction)->Unit(benchmark::kMillisecond);

void BM_EstimatorTrials(benchmark::State& state) {
  const WitnessSpec w = build_witness(kResource);
  const DensityMatrix rho = DensityMatrix::pure(cubic_phase_state(kResource));
  const HomodyneSampler sampler(rho);
  SamplingPlan plan = make_plan(w, 0.05, 0.05, 1);
  plan.trials = state.range(0);
  EstimateOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_f_low(sampler, w, plan, opts).f_low_est);
  state.SetItemsProcessed(state.iterations() * plan.trials);
}
BENCHMARK(BM_EstimatorTrials)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

void BM_InjectionRun(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const InjectionParams p{0.1, 0.1, 1.0, d, 1e-6};
  const FockState resource = cubic_phase_state({0.1, 1.0, 1, d, 1e-6});
  const FockState in = gaussian_state({}, d, 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(inject_cubic(in, resource, p, 0.3, nullptr));
}
BENCHMARK(BM_InjectionRun)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ProtocolRun(benchmark::State& state) {
  const ProtocolRunner runner(ProtocolParams{}, AdversarySpec::honest());
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(runner.run(k++).decision);
}
BENCHMARK(BM_ProtocolRun)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
