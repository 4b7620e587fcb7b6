#include <benchmark/benchmark.h>

#include <vector>

#include "fluxrnn/recurrent.hpp"
#include "fluxrnn/rng.hpp"

using namespace fluxrnn;

namespace {

constexpr std::size_t kFeatures = 12;

std::vector<double> random_input(std::size_t steps) {
  Rng rng(11);
  std::vector<double> x(steps * kFeatures);
  for (auto& v : x) v = rng.normal();
  return x;
}

NetworkParams model(CellType cell, std::size_t units) {
  return init_params(cell, std::vector<std::size_t>{units, units}, kFeatures, 5, 0.2,
                     InitScheme::kInvSqrtFeatures);
}

void BM_Predict(benchmark::State& state, CellType cell) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const NetworkParams p = model(cell, static_cast<std::size_t>(state.range(1)));
  const auto x = random_input(steps);
  for (auto _ : state) benchmark::DoNotOptimize(predict(p, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

void BM_ForwardBackward(benchmark::State& state, CellType cell) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const NetworkParams p = model(cell, static_cast<std::size_t>(state.range(1)));
  const auto x = random_input(steps);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ForwardResult r = forward(p, x, ForwardMode::kTrain, ++seed);
    benchmark::DoNotOptimize(backward(p, *r.cache, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Predict, rnn, CellType::kRNN)->Args({30, 32})->Args({90, 64});
BENCHMARK_CAPTURE(BM_Predict, gru, CellType::kGRU)->Args({30, 32})->Args({90, 64});
BENCHMARK_CAPTURE(BM_Predict, lstm, CellType::kLSTM)->Args({30, 32})->Args({90, 64});
BENCHMARK_CAPTURE(BM_ForwardBackward, rnn, CellType::kRNN)->Args({30, 32})->Args({90, 64});
BENCHMARK_CAPTURE(BM_ForwardBackward, gru, CellType::kGRU)->Args({30, 32})->Args({90, 64});
BENCHMARK_CAPTURE(BM_ForwardBackward, lstm, CellType::kLSTM)->Args({30, 32})->Args({90, 64});
