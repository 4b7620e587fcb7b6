#include <benchmark/benchmark.h>

#include <cmath>

#include "fluxrnn/extremes.hpp"
#include "fluxrnn/rng.hpp"

using namespace fluxrnn;

static void BM_FlagExtremes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(9);
  AnomalySeries a{Date(2000, 1, 1), std::vector<double>(n)};
  double prev = 0.0;
  for (auto& v : a.values) {
    prev = 0.9 * prev + rng.normal();
    v = prev;
  }
  for (auto _ : state) benchmark::DoNotOptimize(flag_extremes(a));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FlagExtremes)->Arg(365 * 5)->Arg(365 * 40);
