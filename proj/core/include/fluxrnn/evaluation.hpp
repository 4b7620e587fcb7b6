#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluxrnn/extremes.hpp"
#include "fluxrnn/recurrent.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fluxrnn {

// RMSE divided by the observed range. Throws LengthMismatch, ZeroRange, or
// PreconditionViolation for fewer than two values.
double nrmse(std::span<const double> preds, std::span<const double> obs);

// Eval-mode predictions for every sample, in order.
std::vector<double> predict_dataset(const NetworkParams& params, const WindowedDataset& data);

enum class EvalRegime { kFull = 0, kGrowingSeason = 1, kExtremes = 2 };
inline constexpr std::array<EvalRegime, 3> kAllRegimes = {
    EvalRegime::kFull, EvalRegime::kGrowingSeason, EvalRegime::kExtremes};

std::string_view regime_name(EvalRegime regime);
// May through September inclusive.
bool in_growing_season(const Date& date);

struct RegimeScore {
  double nrmse = 0.0;
  std::size_t n_samples = 0;
};

struct SiteEvaluation {
  std::string site_id;
  // Indexed by EvalRegime. Absent when the subset has < 2 samples or zero range.
  std::array<std::optional<RegimeScore>, 3> scores;
};

struct EvalReport {
  std::vector<SiteEvaluation> sites;
};

// Scores already-computed predictions; `preds` aligns with `test.samples`.
SiteEvaluation score_regimes(std::span<const double> preds, const WindowedDataset& test,
                             const ExtremeMask& mask, const std::string& site_id);

// Predicts once in eval mode and scores the three regimes for one site's
// test windows.
EvalReport evaluate_regimes(const NetworkParams& params, const WindowedDataset& test,
                            const ExtremeMask& mask);

enum class PermutationGranularity {
  kSampleBlock,  // move each sample's whole window column for the feature
  kTimestep,     // an independent permutation per window position
};

struct FeatureImportance {
  std::string feature;
  double mean_fi = 0.0;
  std::vector<double> repetitions;  // E_f - E_b per repetition
};

struct FIReport {
  std::string site_id;
  double baseline_nrmse = 0.0;
  std::size_t repetitions = 0;
  std::vector<FeatureImportance> features;
};

inline constexpr std::size_t kDefaultRepetitions = 10;

// The permutation used for (feature, repetition): a seeded Fisher-Yates
// shuffle of 0..n-1 with seed + feature * repetitions + repetition.
std::vector<std::size_t> importance_permutation(std::size_t n, std::uint64_t seed,
                                                std::size_t feature, std::size_t repetition,
                                                std::size_t repetitions);

// Permutation feature importance on full-period NRMSE: FI = E_f - E_b.
// Throws SingleSample when the test set has fewer than two samples.
FIReport permutation_importance(const NetworkParams& params, const WindowedDataset& test,
                                std::size_t repetitions = kDefaultRepetitions,
                                std::uint64_t seed = 0,
                                PermutationGranularity granularity =
                                    PermutationGranularity::kSampleBlock);

}  // namespace fluxrnn
