#include <benchmark/benchmark.h>

#include "sievelab/rng.hpp"
#include "sievelab/stick_law.hpp"

namespace {

using sievelab::RandomStream;
using sievelab::StickLaw;

void BM_UnitDraw(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_unit());
}
BENCHMARK(BM_UnitDraw);

void BM_BinomialInversion(benchmark::State& state) {
  RandomStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_binomial(30, 0.2));
}
BENCHMARK(BM_BinomialInversion);

void BM_BinomialRejection(benchmark::State& state) {
  RandomStream rng(3);
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_binomial(n, 0.37));
  state.SetComplexityN(n);
}
BENCHMARK(BM_BinomialRejection)->RangeMultiplier(100)->Range(1000, 10'000'000)->Complexity();

void BM_PoissonRejection(benchmark::State& state) {
  RandomStream rng(4);
  const double mean = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_poisson(mean));
}
BENCHMARK(BM_PoissonRejection)->Arg(50)->Arg(5000)->Arg(500000);

void BM_SampleW(benchmark::State& state) {
  const StickLaw law = StickLaw::parse(
      state.range(0) == 0   ? "uniform"
      : state.range(0) == 1 ? "beta:1.5,2.5"
                            : "heavy:1");
  RandomStream rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample_w(rng));
}
BENCHMARK(BM_SampleW)->Arg(0)->Arg(1)->Arg(2);

void BM_SampleW0(benchmark::State& state) {
  const StickLaw law = StickLaw::beta(1.5, 2.5);
  RandomStream rng(6);
  benchmark::DoNotOptimize(law.sample_w0(rng));  // grid build outside timing
  for (auto _ : state) benchmark::DoNotOptimize(law.sample_w0(rng));
}
BENCHMARK(BM_SampleW0);

}  // namespace

BENCHMARK_MAIN();
