#include <benchmark/benchmark.h>

#include "ddc/bench.hpp"
#include "ddc/engine.hpp"

namespace {

ddc::DataMatrix a09(std::size_t n, std::size_t d) {
  using namespace ddc::bench;
  return sampleGaussian(n, makeCorrelation({CorrelationKind::A09, d, 0}), 1);
}

void BM_RobCorr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ddc::DataMatrix x = a09(n, 2);
  const auto a = x.cells().presentValues(0), b = x.cells().presentValues(1);
  const ddc::RobustTuning tuning;
  for (auto _ : state) benchmark::DoNotOptimize(ddc::robCorr(a, b, tuning));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RobCorr)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_RobSlope(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ddc::DataMatrix x = a09(n, 2);
  const auto a = x.cells().presentValues(0), b = x.cells().presentValues(1);
  const ddc::RobustTuning tuning;
  for (auto _ : state) benchmark::DoNotOptimize(ddc::robSlope(a, b, tuning));
}
BENCHMARK(BM_RobSlope)->RangeMultiplier(4)->Range(64, 16384);

void BM_RunDdc(benchmark::State& state) {
  const ddc::DataMatrix x = a09(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(ddc::runDdc(x));
}
BENCHMARK(BM_RunDdc)->Args({200, 20})->Args({200, 100})->Args({180, 750})->Unit(benchmark::kMillisecond);

void BM_RunDdcTopK(benchmark::State& state) {
  const ddc::DataMatrix x = a09(100, 300);
  ddc::DdcParams params;
  params.kNeighbors = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ddc::runDdc(x, params));
}
BENCHMARK(BM_RunDdcTopK)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
