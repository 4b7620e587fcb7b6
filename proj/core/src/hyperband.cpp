#include "fluxrnn/hyperband.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/recurrent.hpp"

namespace fluxrnn {

void HyperBandConfig::validate() const {
  if (units_grid.empty()) throw EmptySpace("no unit sizes to choose from");
  if (min_layers < 1 || max_layers < min_layers) throw EmptySpace("layer range is empty");
  if (max_layers > kMaxLayers) throw ConfigError("at most 5 layers are supported");
  for (std::size_t u : units_grid) {
    if (u < 1 || u > kMaxUnits) throw ConfigError("unit sizes must be in 1..512");
  }
  if (!(lr_min > 0.0 && lr_min <= lr_max)) throw EmptySpace("learning-rate range is empty");
  if (eta < 2) throw ConfigError("eta must be >= 2");
  if (max_resource < eta) throw ConfigError("max resource must be >= eta");
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

std::vector<Bracket> hyperband_schedule(const HyperBandConfig& config) {
  config.validate();
  const std::size_t eta = config.eta;
  const std::size_t big_r = config.max_resource;
  std::size_t s_max = 0;
  for (std::size_t p = eta; p <= big_r; p *= eta) ++s_max;

  std::vector<Bracket> out;
  for (std::size_t s = s_max + 1; s-- > 0;) {
    std::size_t n = 0;
    if (config.rounding == BracketRounding::kIntegerRatio) {
      n = (s_max + 1) / (s + 1) * ipow(eta, s);
    } else {
      n = static_cast<std::size_t>(std::ceil(static_cast<double>(s_max + 1) /
                                             static_cast<double>(s + 1) *
                                             static_cast<double>(ipow(eta, s))));
    }
    Bracket b{s, {}};
    for (std::size_t i = 0; i <= s; ++i) {
      Rung rung;
      rung.configs = n / ipow(eta, i);
      rung.resource = std::max<std::size_t>(1, big_r / ipow(eta, s - i));
      rung.survivors = rung.configs / eta;
      if (rung.configs == 0) break;
      b.rungs.push_back(rung);
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::size_t hyperband_budget(const HyperBandConfig& config) {
  std::size_t total = 0;
  for (const auto& b : hyperband_schedule(config)) {
    for (const auto& r : b.rungs) total += r.configs * r.resource;
  }
  return total;
}

HyperParams sample_hyperparams(const HyperBandConfig& config, Rng& rng) {
  HyperParams hp;
  const std::size_t layers =
      config.min_layers + static_cast<std::size_t>(rng.below(config.max_layers - config.min_layers + 1));
  for (std::size_t i = 0; i < layers; ++i) {
    hp.layer_sizes.push_back(config.units_grid[rng.below(config.units_grid.size())]);
  }
  const double lo = std::log(config.lr_min);
  const double hi = std::log(config.lr_max);
  hp.learning_rate = std::exp(rng.uniform(lo, hi));
  return hp;
}

HyperBandResult hyperband_search(const HyperBandConfig& config, const HyperObjective& objective,
                                 std::uint64_t seed) {
  const auto schedule = hyperband_schedule(config);
  Rng rng(seed);
  HyperBandResult result;
  bool have_best = false;
  std::size_t best_ordinal = 0;

  for (const auto& plan : schedule) {
    if (plan.rungs.empty()) continue;
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < plan.rungs.front().configs; ++i) {
      alive.push_back(result.sampled.size());
      result.sampled.push_back(sample_hyperparams(config, rng));
    }

    Bracket executed{plan.s, {}};
    for (std::size_t ri = 0; ri < plan.rungs.size(); ++ri) {
      const std::size_t epochs = plan.rungs[ri].resource;
      std::vector<std::pair<double, std::size_t>> scored;
      for (std::size_t ordinal : alive) {
        const double score = objective(result.sampled[ordinal], epochs);
        result.total_epochs += epochs;
        result.trials.push_back({plan.s, ri, ordinal, epochs, score});
        scored.emplace_back(std::isnan(score) ? HUGE_VAL : score, ordinal);
      }
      std::sort(scored.begin(), scored.end());
      const std::size_t keep = alive.size() / config.eta;
      executed.rungs.push_back({alive.size(), epochs, keep});

      if (ri + 1 == plan.rungs.size() || keep == 0) {
        const auto& [score, ordinal] = scored.front();
        if (!have_best || score < result.best_score ||
            (score == result.best_score && ordinal < best_ordinal)) {
          result.best_score = score;
          best_ordinal = ordinal;
          have_best = true;
        }
        break;
      }
      alive.clear();
      for (std::size_t k = 0; k < keep; ++k) alive.push_back(scored[k].second);
    }
    result.executed.push_back(std::move(executed));
  }
  if (!have_best) throw EmptySpace("no configuration was evaluated");
  result.best = result.sampled[best_ordinal];
  return result;
}

}  // namespace fluxrnn
