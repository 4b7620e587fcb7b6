#include "fluxrnn/extremes.hpp"

#include <algorithm>
#include <cmath>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

SeasonalCycle::SeasonalCycle() { values_.fill(kMissing); }

bool ExtremeMask::is_extreme(const Date& date) const {
  const long i = days_between(start, date);
  if (i < 0 || static_cast<std::size_t>(i) >= flags.size()) return false;
  return flags[static_cast<std::size_t>(i)] != 0;
}

std::size_t ExtremeMask::count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw PreconditionViolation("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SeasonalCycle mean_seasonal_cycle(const SiteSeries& series) {
  std::array<double, 12 * 31> sum{};
  std::array<std::size_t, 12 * 31> count{};
  std::size_t present = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double g = series.gpp[i];
    if (is_missing(g)) continue;
    const Date d = series.date_at(i);
    const std::size_t idx = (d.month() - 1) * 31 + (d.day() - 1);
    sum[idx] += g;
    ++count[idx];
    ++present;
  }
  if (present == 0) throw EmptySeries();

  SeasonalCycle cycle;
  for (unsigned m = 1; m <= 12; ++m) {
    for (unsigned d = 1; d <= 31; ++d) {
      const std::size_t idx = (m - 1) * 31 + (d - 1);
      if (count[idx] > 0) cycle.set(m, d, sum[idx] / static_cast<double>(count[idx]));
    }
  }
  if (!cycle.defined(2, 29) && cycle.defined(2, 28)) cycle.set(2, 29, cycle.at(2, 28));
  return cycle;
}

AnomalySeries anomalies(const SiteSeries& series, const SeasonalCycle& cycle) {
  AnomalySeries out{series.start, std::vector<double>(series.size(), kMissing)};
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double g = series.gpp[i];
    if (is_missing(g)) continue;
    const Date d = series.date_at(i);
    if (!cycle.defined(d.month(), d.day())) throw MissingCycleDay(d.month(), d.day());
    out.values[i] = g - cycle.at(d.month(), d.day());
  }
  return out;
}

ExtremeMask flag_extremes(const AnomalySeries& anoms, const ExtremeOptions& options) {
  if (!(options.q > 0.0 && options.q < 0.5)) throw PreconditionViolation("q must lie in (0, 0.5)");
  if (options.min_run < 1) throw PreconditionViolation("min_run must be >= 1");

  std::vector<double> pool;
  for (double a : anoms.values) {
    if (!is_missing(a)) pool.push_back(a);
  }
  if (pool.size() < 10) throw InsufficientData(pool.size());
  if (options.tail == TailMode::kNegativeOnly) {
    std::erase_if(pool, [](double a) { return !(a < 0.0); });
    if (pool.empty()) throw InsufficientData(0);
  }
  std::sort(pool.begin(), pool.end());

  ExtremeMask mask{anoms.start, std::vector<std::uint8_t>(anoms.size(), 0),
                   empirical_quantile(pool, options.q)};
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  auto close_run = [&]() {
    if (run_len >= options.min_run) {
      std::fill_n(mask.flags.begin() + static_cast<std::ptrdiff_t>(run_start), run_len, 1);
    }
    run_len = 0;
  };
  for (std::size_t i = 0; i < anoms.size(); ++i) {
    const double a = anoms.values[i];
    if (!is_missing(a) && a < mask.threshold) {
      if (run_len == 0) run_start = i;
      ++run_len;
    } else {
      close_run();
    }
  }
  close_run();
  return mask;
}

ExtremeMask detect_extremes(const SiteSeries& series, const ExtremeOptions& options) {
  return flag_extremes(anomalies(series, mean_seasonal_cycle(series)), options);
}

}  // namespace fluxrnn
