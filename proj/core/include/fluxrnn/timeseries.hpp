#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluxrnn/date.hpp"
#include "fluxrnn/matrix.hpp"

namespace fluxrnn {

// Missing observations are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

// Daily GPP target for one site. Dates are implied by `start` and the index,
// which makes the series gap-free by construction.
struct SiteSeries {
  std::string site_id;
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
  Date start;
  std::vector<double> gpp;          // g C m-2 d-1, or kMissing
  std::vector<double> qc_fraction;  // [0, 1], or kMissing

  std::size_t size() const noexcept { return gpp.size(); }
  Date date_at(std::size_t i) const { return start.plus_days(static_cast<long>(i)); }
  std::size_t present_count() const;
  // Throws LengthMismatch or PreconditionViolation.
  void validate() const;
};

// Dates x features predictor matrix with named columns.
class FeatureTable {
 public:
  FeatureTable() = default;
  // Throws DuplicateFeature when a name repeats.
  FeatureTable(std::vector<std::string> names, Matrix values);

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Matrix& values() const noexcept { return values_; }

  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
  double& operator()(std::size_t r, std::size_t c) { return values_(r, c); }
  std::span<const double> row(std::size_t r) const { return values_.row(r); }

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<double> column(std::size_t c) const { return values_.column(c); }
  bool has_missing() const;

  // Returns a table with `name` appended. Throws DuplicateFeature / LengthMismatch.
  FeatureTable with_column(const std::string& name, std::span<const double> values) const;
  // Returns a table keeping only the listed column indices, in the given order.
  FeatureTable select(std::span<const std::size_t> columns) const;

  friend bool operator==(const FeatureTable& a, const FeatureTable& b);

 private:
  std::vector<std::string> names_;
  Matrix values_;
};

struct SplitSpec {
  std::set<int> train_years;
  std::set<int> test_years;

  // Throws PreconditionViolation when the year sets overlap or one is empty.
  void validate() const;
};

enum class SplitPart { kTrain, kTest };

struct SplitHalf {
  SiteSeries series;   // targets outside this half's years are masked
  FeatureTable table;  // the full feature history
};

struct SplitResult {
  SplitHalf train;
  SplitHalf test;
};

struct Sample {
  std::vector<double> input;  // length x n_features, row-major, oldest row first
  double target = 0.0;
  Date target_date;
  std::string site_id;
};

struct WindowedDataset {
  std::size_t length = 0;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::vector<double> targets() const;
  // Appends another dataset with matching shape and feature names.
  void append(const WindowedDataset& other);
};

inline constexpr double kDefaultQcMin = 0.70;
inline constexpr double kDefaultValidMin = 0.60;
inline constexpr std::size_t kDefaultWindowLength = 90;

// Masks GPP where the quality fraction is below `qc_min` (or missing) and where
// GPP is negative. Throws SiteRejected when the remaining valid fraction of the
// series is below `valid_min`.
SiteSeries filter_gpp_quality(const SiteSeries& series, double qc_min = kDefaultQcMin,
                              double valid_min = kDefaultValidMin);

// Linear interpolation of interior gaps, nearest-value fill at the edges.
// Present values are copied unchanged. Throws EmptyColumn.
FeatureTable interpolate_features(const FeatureTable& table);

// Partitions the targets by calendar year. Both halves keep the full feature
// table so test windows can reach back into training years.
SplitResult temporal_split(const SiteSeries& series, const FeatureTable& table,
                           const SplitSpec& spec);

// Sequence-to-one windows ending on each present target in the selected part.
WindowedDataset build_windows(const SiteSeries& series, const FeatureTable& table,
                              std::size_t length, const SplitSpec& split, SplitPart which);

}  // namespace fluxrnn
