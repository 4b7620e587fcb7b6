#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fluxrnn/date.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fluxrnn {

// Mean GPP per calendar day across all years. Undefined days hold kMissing.
class SeasonalCycle {
 public:
  SeasonalCycle();

  double at(unsigned month, unsigned day) const { return values_[index(month, day)]; }
  bool defined(unsigned month, unsigned day) const { return !is_missing(at(month, day)); }
  void set(unsigned month, unsigned day, double v) { values_[index(month, day)] = v; }

 private:
  static std::size_t index(unsigned month, unsigned day) { return (month - 1) * 31 + (day - 1); }
  std::array<double, 12 * 31> values_;
};

struct AnomalySeries {
  Date start;
  std::vector<double> values;  // kMissing where GPP is missing

  std::size_t size() const noexcept { return values.size(); }
  Date date_at(std::size_t i) const { return start.plus_days(static_cast<long>(i)); }
};

struct ExtremeMask {
  Date start;
  std::vector<std::uint8_t> flags;  // 1 = extreme
  double threshold = 0.0;

  std::size_t size() const noexcept { return flags.size(); }
  Date date_at(std::size_t i) const { return start.plus_days(static_cast<long>(i)); }
  // False for dates outside the mask.
  bool is_extreme(const Date& date) const;
  std::size_t count() const;
};

// Which anomalies define the tail quantile.
enum class TailMode {
  kAll,           // q-quantile of every present anomaly
  kNegativeOnly,  // q-quantile of the negative anomalies only
};

inline constexpr double kDefaultExtremeQuantile = 0.10;
inline constexpr std::size_t kDefaultMinRun = 5;

struct ExtremeOptions {
  double q = kDefaultExtremeQuantile;
  std::size_t min_run = kDefaultMinRun;
  TailMode tail = TailMode::kAll;
};

// Linear interpolation between order statistics at position (n - 1) q.
// `sorted` must be ascending and non-empty.
double empirical_quantile(std::span<const double> sorted, double q);

// Throws EmptySeries.
SeasonalCycle mean_seasonal_cycle(const SiteSeries& series);

// Throws MissingCycleDay.
AnomalySeries anomalies(const SiteSeries& series, const SeasonalCycle& cycle);

// Flags maximal runs of at least `min_run` days with anomaly strictly below
// the tail threshold. Missing anomalies break runs. Throws InsufficientData
// with fewer than 10 present anomalies.
ExtremeMask flag_extremes(const AnomalySeries& anoms, const ExtremeOptions& options = {});

// mean_seasonal_cycle + anomalies + flag_extremes.
ExtremeMask detect_extremes(const SiteSeries& series, const ExtremeOptions& options = {});

}  // namespace fluxrnn
