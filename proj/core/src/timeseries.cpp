#include "fluxrnn/timeseries.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_set>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

std::size_t SiteSeries::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(gpp.begin(), gpp.end(), [](double v) { return !is_missing(v); }));
}

void SiteSeries::validate() const {
  if (qc_fraction.size() != gpp.size()) {
    throw LengthMismatch("gpp has " + std::to_string(gpp.size()) + " values, qc has " +
                         std::to_string(qc_fraction.size()));
  }
  if (latitude < -90.0 || latitude > 90.0 || longitude < -180.0 || longitude > 180.0) {
    throw PreconditionViolation("site coordinates out of range");
  }
}

FeatureTable::FeatureTable(std::vector<std::string> names, Matrix values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.cols()) {
    throw ShapeMismatch(std::to_string(names_.size()) + " names for " +
                        std::to_string(values_.cols()) + " columns");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw DuplicateFeature(n);
  }
}

std::optional<std::size_t> FeatureTable::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

bool FeatureTable::has_missing() const {
  const auto data = values_.data();
  return std::any_of(data.begin(), data.end(), [](double v) { return is_missing(v); });
}

FeatureTable FeatureTable::with_column(const std::string& name,
                                       std::span<const double> values) const {
  if (values.size() != rows()) {
    throw LengthMismatch("column '" + name + "' has " + std::to_string(values.size()) +
                         " rows, table has " + std::to_string(rows()));
  }
  if (index_of(name)) throw DuplicateFeature(name);
  Matrix out(rows(), cols() + 1);
  for (std::size_t r = 0; r < rows(); ++r) {
    auto src = row(r);
    auto dst = out.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[cols()] = values[r];
  }
  auto names = names_;
  names.push_back(name);
  return FeatureTable(std::move(names), std::move(out));
}

FeatureTable FeatureTable::select(std::span<const std::size_t> columns) const {
  Matrix out(rows(), columns.size());
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= cols()) throw ShapeMismatch("column index out of range");
    names.push_back(names_[columns[j]]);
    for (std::size_t r = 0; r < rows(); ++r) out(r, j) = values_(r, columns[j]);
  }
  return FeatureTable(std::move(names), std::move(out));
}

bool operator==(const FeatureTable& a, const FeatureTable& b) {
  if (a.names_ != b.names_ || a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const auto x = a.values_.data();
  const auto y = b.values_.data();
  // Bitwise comparison so that missing entries compare equal.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) return false;
  }
  return true;
}

void SplitSpec::validate() const {
  if (train_years.empty() || test_years.empty()) {
    throw PreconditionViolation("split needs at least one train and one test year");
  }
  for (int y : train_years) {
    if (test_years.contains(y)) {
      throw PreconditionViolation("year " + std::to_string(y) + " is in both train and test");
    }
  }
}

std::vector<double> WindowedDataset::targets() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.target);
  return out;
}

void WindowedDataset::append(const WindowedDataset& other) {
  if (other.empty()) return;
  if (empty() && feature_names.empty()) {
    length = other.length;
    n_features = other.n_features;
    feature_names = other.feature_names;
  } else if (other.length != length || other.feature_names != feature_names) {
    throw ShapeMismatch("datasets differ in window length or features");
  }
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
}

SiteSeries filter_gpp_quality(const SiteSeries& series, double qc_min, double valid_min) {
  series.validate();
  if (qc_min < 0.0 || qc_min > 1.0 || valid_min < 0.0 || valid_min > 1.0) {
    throw PreconditionViolation("qc_min and valid_min must lie in [0, 1]");
  }
  SiteSeries out = series;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double qc = out.qc_fraction[i];
    const double g = out.gpp[i];
    if (is_missing(qc) || qc < qc_min || (!is_missing(g) && g < 0.0)) out.gpp[i] = kMissing;
  }
  const double valid_fraction =
      out.size() == 0 ? 0.0
                      : static_cast<double>(out.present_count()) / static_cast<double>(out.size());
  if (valid_fraction < valid_min) throw SiteRejected(valid_fraction);
  return out;
}

FeatureTable interpolate_features(const FeatureTable& table) {
  FeatureTable out = table;
  const std::size_t n = table.rows();
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::vector<std::size_t> present;
    for (std::size_t r = 0; r < n; ++r) {
      if (!is_missing(table(r, c))) present.push_back(r);
    }
    if (present.empty()) {
      if (n == 0) continue;
      throw EmptyColumn(table.names()[c]);
    }
    for (std::size_t r = 0; r < present.front(); ++r) out(r, c) = table(present.front(), c);
    for (std::size_t r = present.back() + 1; r < n; ++r) out(r, c) = table(present.back(), c);
    for (std::size_t k = 0; k + 1 < present.size(); ++k) {
      const std::size_t a = present[k];
      const std::size_t b = present[k + 1];
      const double va = table(a, c);
      const double vb = table(b, c);
      const double span = static_cast<double>(b - a);
      for (std::size_t r = a + 1; r < b; ++r) {
        const double w = static_cast<double>(r - a) / span;
        out(r, c) = va + w * (vb - va);
      }
    }
  }
  return out;
}

namespace {

SiteSeries mask_to_years(const SiteSeries& series, const std::set<int>& years) {
  SiteSeries out = series;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!years.contains(out.date_at(i).year())) out.gpp[i] = kMissing;
  }
  return out;
}

}  // namespace

SplitResult temporal_split(const SiteSeries& series, const FeatureTable& table,
                           const SplitSpec& spec) {
  spec.validate();
  series.validate();
  if (table.rows() != series.size()) {
    throw LengthMismatch("feature table has " + std::to_string(table.rows()) +
                         " rows, series has " + std::to_string(series.size()));
  }
  SplitResult result{{mask_to_years(series, spec.train_years), table},
                     {mask_to_years(series, spec.test_years), table}};
  if (result.train.series.present_count() == 0) throw EmptySplit("no valid training targets");
  if (result.test.series.present_count() == 0) throw EmptySplit("no valid test targets");
  return result;
}

WindowedDataset build_windows(const SiteSeries& series, const FeatureTable& table,
                              std::size_t length, const SplitSpec& split, SplitPart which) {
  split.validate();
  series.validate();
  if (length < 1) throw PreconditionViolation("window length must be >= 1");
  if (table.rows() != series.size()) {
    throw LengthMismatch("feature table has " + std::to_string(table.rows()) +
                         " rows, series has " + std::to_string(series.size()));
  }
  if (table.has_missing()) throw PreconditionViolation("feature table must be interpolated");

  const auto& years = which == SplitPart::kTrain ? split.train_years : split.test_years;
  const std::size_t nf = table.cols();

  WindowedDataset ds;
  ds.length = length;
  ds.n_features = nf;
  ds.feature_names = table.names();
  for (std::size_t t = length - 1; t < series.size(); ++t) {
    if (is_missing(series.gpp[t])) continue;
    const Date date = series.date_at(t);
    if (!years.contains(date.year())) continue;
    Sample s;
    s.input.resize(length * nf);
    const std::size_t first = t + 1 - length;
    for (std::size_t k = 0; k < length; ++k) {
      const auto src = table.row(first + k);
      std::copy(src.begin(), src.end(), s.input.begin() + static_cast<std::ptrdiff_t>(k * nf));
    }
    s.target = series.gpp[t];
    s.target_date = date;
    s.site_id = series.site_id;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace fluxrnn
