#include "fluxrnn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/rng.hpp"

namespace fluxrnn {

double nrmse(std::span<const double> preds, std::span<const double> obs) {
  if (preds.size() != obs.size()) {
    throw LengthMismatch(std::to_string(preds.size()) + " predictions for " +
                         std::to_string(obs.size()) + " observations");
  }
  if (obs.size() < 2) throw PreconditionViolation("NRMSE needs at least two values");
  const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw ZeroRange();
  double ss = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double e = preds[i] - obs[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(obs.size())) / range;
}

std::vector<double> predict_dataset(const NetworkParams& params, const WindowedDataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(predict(params, s.input));
  return out;
}

std::string_view regime_name(EvalRegime regime) {
  switch (regime) {
    case EvalRegime::kFull: return "full";
    case EvalRegime::kGrowingSeason: return "growing_season";
    case EvalRegime::kExtremes: return "extremes";
  }
  return "?";
}

bool in_growing_season(const Date& date) { return date.month() >= 5 && date.month() <= 9; }

namespace {

std::optional<RegimeScore> score_subset(std::span<const double> preds,
                                        const WindowedDataset& test,
                                        const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) return std::nullopt;
  std::vector<double> p;
  std::vector<double> o;
  for (std::size_t i : idx) {
    p.push_back(preds[i]);
    o.push_back(test.samples[i].target);
  }
  const auto [lo, hi] = std::minmax_element(o.begin(), o.end());
  if (!(*hi > *lo)) return std::nullopt;
  return RegimeScore{nrmse(p, o), idx.size()};
}

}  // namespace

SiteEvaluation score_regimes(std::span<const double> preds, const WindowedDataset& test,
                             const ExtremeMask& mask, const std::string& site_id) {
  if (preds.size() != test.size()) throw LengthMismatch("predictions do not match test set");
  std::array<std::vector<std::size_t>, 3> subsets;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Date& d = test.samples[i].target_date;
    subsets[0].push_back(i);
    if (in_growing_season(d)) subsets[1].push_back(i);
    if (mask.is_extreme(d)) subsets[2].push_back(i);
  }
  SiteEvaluation out;
  out.site_id = site_id;
  for (std::size_t r = 0; r < 3; ++r) out.scores[r] = score_subset(preds, test, subsets[r]);
  return out;
}

EvalReport evaluate_regimes(const NetworkParams& params, const WindowedDataset& test,
                            const ExtremeMask& mask) {
  const auto preds = predict_dataset(params, test);
  const std::string site = test.empty() ? std::string{} : test.samples.front().site_id;
  return EvalReport{{score_regimes(preds, test, mask, site)}};
}

std::vector<std::size_t> importance_permutation(std::size_t n, std::uint64_t seed,
                                                std::size_t feature, std::size_t repetition,
                                                std::size_t repetitions) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed + feature * repetitions + repetition);
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

FIReport permutation_importance(const NetworkParams& params, const WindowedDataset& test,
                                std::size_t repetitions, std::uint64_t seed,
                                PermutationGranularity granularity) {
  if (repetitions < 1) throw PreconditionViolation("repetitions must be >= 1");
  if (test.size() < 2) throw SingleSample();
  const std::size_t n = test.size();
  const std::size_t nf = test.n_features;
  const std::size_t len = test.length;
  const auto obs = test.targets();

  FIReport report;
  report.site_id = test.samples.front().site_id;
  report.repetitions = repetitions;
  report.baseline_nrmse = nrmse(predict_dataset(params, test), obs);

  std::vector<double> window(len * nf);
  std::vector<double> preds(n);
  for (std::size_t f = 0; f < nf; ++f) {
    FeatureImportance fi;
    fi.feature = f < test.feature_names.size() ? test.feature_names[f] : std::to_string(f);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const auto perm = importance_permutation(n, seed, f, rep, repetitions);
      std::vector<std::vector<std::size_t>> step_perms;
      if (granularity == PermutationGranularity::kTimestep) {
        for (std::size_t k = 0; k < len; ++k) {
          step_perms.push_back(importance_permutation(
              n, derive_seed(seed + f * repetitions + rep, k), 0, 0, 1));
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& own = test.samples[i].input;
        std::copy(own.begin(), own.end(), window.begin());
        for (std::size_t k = 0; k < len; ++k) {
          const std::size_t donor =
              granularity == PermutationGranularity::kSampleBlock ? perm[i] : step_perms[k][i];
          window[k * nf + f] = test.samples[donor].input[k * nf + f];
        }
        preds[i] = predict(params, window);
      }
      fi.repetitions.push_back(nrmse(preds, obs) - report.baseline_nrmse);
    }
    double sum = 0.0;
    for (double v : fi.repetitions) sum += v;
    fi.mean_fi = sum / static_cast<double>(repetitions);
    report.features.push_back(std::move(fi));
  }
  return report;
}

}  // namespace fluxrnn
