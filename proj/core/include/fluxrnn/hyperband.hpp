#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fluxrnn/rng.hpp"

namespace fluxrnn {

// One point of the search space.
struct HyperParams {
  std::vector<std::size_t> layer_sizes;
  double learning_rate = 1e-3;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// How the initial configuration count of a bracket is rounded.
enum class BracketRounding {
  // floor((s_max + 1) / (s + 1)) * eta^s, integer arithmetic throughout.
  // R = 81, eta = 3 gives 81, 27, 9, 6, 5.
  kIntegerRatio,
  // ceil((s_max + 1) / (s + 1) * eta^s) in real arithmetic: 81, 34, 15, 8, 5.
  kRealCeil,
};

struct HyperBandConfig {
  std::size_t max_resource = 81;  // epochs
  std::size_t eta = 3;
  std::size_t min_layers = 1;
  std::size_t max_layers = 5;
  std::vector<std::size_t> units_grid = {16, 32, 64, 128, 256, 512};
  double lr_min = 1e-4;
  double lr_max = 1e-2;
  BracketRounding rounding = BracketRounding::kIntegerRatio;

  // Throws EmptySpace or ConfigError.
  void validate() const;
};

struct Rung {
  std::size_t configs = 0;
  std::size_t resource = 0;
  std::size_t survivors = 0;  // floor(configs / eta)
};

struct Bracket {
  std::size_t s = 0;
  std::vector<Rung> rungs;
};

// The planned brackets s = s_max .. 0.
std::vector<Bracket> hyperband_schedule(const HyperBandConfig& config);

// Sum of configs * resource over every rung of every bracket.
std::size_t hyperband_budget(const HyperBandConfig& config);

// Layer count uniform, units per layer from the grid, learning rate log-uniform.
HyperParams sample_hyperparams(const HyperBandConfig& config, Rng& rng);

// Lower score is better. Must be deterministic for a given (params, epochs).
using HyperObjective = std::function<double(const HyperParams&, std::size_t epochs)>;

struct TrialRecord {
  std::size_t bracket = 0;
  std::size_t rung = 0;
  std::size_t ordinal = 0;  // global sampling order
  std::size_t epochs = 0;
  double score = 0.0;
};

struct HyperBandResult {
  HyperParams best;
  double best_score = 0.0;
  std::vector<Bracket> executed;
  std::vector<TrialRecord> trials;
  std::vector<HyperParams> sampled;  // indexed by ordinal
  std::size_t total_epochs = 0;
};

// Runs every bracket with successive halving. Ties are broken by sampling
// ordinal. Throws EmptySpace.
HyperBandResult hyperband_search(const HyperBandConfig& config, const HyperObjective& objective,
                                 std::uint64_t seed);

}  // namespace fluxrnn
