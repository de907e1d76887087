#include <benchmark/benchmark.h>

#include "sievelab/exact_engine.hpp"
#include "sievelab/point_process.hpp"
#include "sievelab/sieve_sim.hpp"

namespace {

using namespace sievelab;

// The binomial-chain reduction keeps one outcome at O(I_n) draws, so the
// time per replicate should grow like log n.
void BM_SimulateOutcome(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  RandomStream rng(1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_outcome(law, n, rng));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SimulateOutcome)->RangeMultiplier(10)->Range(100, 1'000'000)->Complexity();

void BM_Replicate(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  ReplicateOptions opts;
  opts.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        replicate(law, 10'000, 20'000, 7, SieveStatistic::ZPrefix, opts));
  }
}
BENCHMARK(BM_Replicate)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EnumerateFinite(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_finite(law, n, 20));
}
BENCHMARK(BM_EnumerateFinite)->Arg(3)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PatternProb(benchmark::State& state) {
  const StickLaw law = StickLaw::beta(1.5, 2.5);
  const Pattern pattern({2, 0, 1, 3, 0, 1});
  benchmark::DoNotOptimize(pattern_prob(law, pattern));  // warm the cache
  for (auto _ : state) benchmark::DoNotOptimize(pattern_prob(law, pattern));
}
BENCHMARK(BM_PatternProb);

void BM_SampleLimitZ(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  RandomStream rng(2);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_limit_Z(law, rng, depth));
}
BENCHMARK(BM_SampleLimitZ)->Arg(1)->Arg(2)->Arg(8);

void BM_SampleLimitKr(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  RandomStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_limit_Kr(law, rng, 2));
}
BENCHMARK(BM_SampleLimitKr);

void BM_BuildWindow(benchmark::State& state) {
  const StickLaw law = StickLaw::uniform();
  RandomStream rng(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(RenewalWindow::build(law, rng, 0.01, 1.0));
}
BENCHMARK(BM_BuildWindow);

}  // namespace

BENCHMARK_MAIN();
