#include <benchmark/benchmark.h>

#include <random>

#include "photostat/correlator.hpp"

namespace {

using photostat::TagStream;

TagStream poisson(double rate, double duration, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::exponential_distribution<double> gap(rate);
  TagStream s{.duration = duration};
  for (double t = gap(engine); t < duration; t += gap(engine)) s.tags.push_back(t);
  return s;
}

// N tags per channel at a fixed rate, so every reference has the same number
// of in-window partners (about 10) and the pair count grows linearly in N.
void BM_CrossCorrelate(benchmark::State& state) {
  const auto n = static_cast<double>(state.range(0));
  const double rate = 1e6;
  const double duration = n / rate;
  const auto a = poisson(rate, duration, 1);
  const auto b = poisson(rate, duration, 2);
  const double bin = 10e-9;
  const double window = 500 * bin;
  std::uint64_t pairs = 0;
  for (auto _ : state) {
    const auto h = photostat::cross_correlate(a, b, bin, window);
    pairs = h.total_pairs();
    benchmark::DoNotOptimize(h.counts().data());
  }
  state.counters["pairs"] = static_cast<double>(pairs);
  state.counters["tags/s"] = benchmark::Counter(2.0 * n, benchmark::Counter::kIsIterationInvariantRate);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrossCorrelate)->RangeMultiplier(2)->Range(1 << 18, 1 << 22)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_Merge(benchmark::State& state) {
  const auto a = poisson(1e6, 0.1, 3);
  const auto b = poisson(1e6, 0.1, 4);
  const auto h = photostat::cross_correlate(a, b, 1e-9, static_cast<double>(state.range(0)) * 1e-9);
  for (auto _ : state) benchmark::DoNotOptimize(photostat::merge(h, h));
}
BENCHMARK(BM_Merge)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
