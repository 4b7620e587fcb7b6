#pragma once

// Independent reference computations used as test oracles. None of these call
// into the library code they check.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fluxrnn/matrix.hpp"
#include "fluxrnn/recurrent.hpp"

namespace oracle {

// Central finite differences of the train-mode prediction (fixed dropout seed)
// against backward(). Relative error |a - n| / max(|a|, |n|, floor).
struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};
GradCheck gradient_check(const fluxrnn::NetworkParams& params, std::span<const double> input,
                         std::uint64_t dropout_seed, double step = 1e-5, double floor = 1e-6);

// Sorts present values, interpolates the q-quantile at (n - 1) q and scans for
// runs strictly below it. NaN marks a missing anomaly.
std::vector<std::uint8_t> extremes_mask(const std::vector<double>& anoms, double q,
                                        std::size_t min_run, bool negative_only = false);

// Mean over 1440 one-minute midpoints of tau * G_sc * E0 * max(0, cos zenith).
double clearsky_per_minute(double latitude_rad, int doy, double tau);

// Dense symmetric eigendecomposition of the sample correlation (or covariance)
// matrix through Eigen. Values descending, vectors as rows.
struct EigenDecomp {
  std::vector<double> values;
  fluxrnn::Matrix vectors;
};
EigenDecomp correlation_eigen(const fluxrnn::Matrix& data, bool standardize = true);

// sqrt(mean((p - o)^2)) / (max(o) - min(o)) with a separate pass per term.
double nrmse_two_pass(std::span<const double> preds, std::span<const double> obs);

}  // namespace oracle
