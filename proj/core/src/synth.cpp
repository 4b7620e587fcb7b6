#include "fluxrnn/synth.hpp"

#include <algorithm>
#include <cmath>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/radiation.hpp"
#include "fluxrnn/rng.hpp"

namespace fluxrnn {

void SynthSpec::validate() const {
  if (n_years < 1) throw InvalidSpec("n_years must be >= 1");
  if (latitude < -90.0 || latitude > 90.0) throw InvalidSpec("latitude out of range");
  if (longitude < -180.0 || longitude > 180.0) throw InvalidSpec("longitude out of range");
  if (!(amplitude > 0.0)) throw InvalidSpec("amplitude must be positive");
  if (!(noise_std >= 0.0) || !(greenness_noise >= 0.0) || !(stress_noise >= 0.0)) {
    throw InvalidSpec("noise levels must be non-negative");
  }
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidSpec("tau must lie in (0, 1]");
  for (const auto& d : droughts) {
    if (d.year_offset >= n_years) throw InvalidSpec("drought year outside the series");
    if (d.length < 5) throw InvalidSpec("drought length must be >= 5 days");
    if (!(d.depth > 0.0 && d.depth < 1.0)) throw InvalidSpec("drought depth must lie in (0, 1)");
    const int year = start_year + static_cast<int>(d.year_offset);
    const int days_in_year = is_leap_year(year) ? 366 : 365;
    if (d.start_doy < 1 || d.start_doy + static_cast<int>(d.length) - 1 > days_in_year) {
      throw InvalidSpec("drought window leaves its calendar year");
    }
  }
}

SynthResult synth_generate(const SynthSpec& spec) {
  spec.validate();
  const Date start(spec.start_year, 1, 1);
  const Date end(spec.start_year + static_cast<int>(spec.n_years), 1, 1);
  const auto days = static_cast<std::size_t>(days_between(start, end));

  const auto rad = clearsky_series(site_from_degrees(spec.latitude, spec.longitude), start, days,
                                   spec.tau).values;
  const double rad_max = *std::max_element(rad.begin(), rad.end());
  if (!(rad_max > 0.0)) throw InvalidSpec("site receives no radiation");

  std::vector<double> factor(days, 1.0);
  ExtremeMask truth{start, std::vector<std::uint8_t>(days, 0), 0.0};
  for (const auto& d : spec.droughts) {
    const Date first = Date(spec.start_year + static_cast<int>(d.year_offset), 1, 1)
                           .plus_days(d.start_doy - 1);
    const auto offset = static_cast<std::size_t>(days_between(start, first));
    for (std::size_t i = offset; i < offset + d.length; ++i) {
      factor[i] = std::min(factor[i], d.depth);
      truth.flags[i] = 1;
    }
  }

  Rng rng(spec.seed);
  SynthResult out;
  out.series.site_id = spec.site_id;
  out.series.latitude = spec.latitude;
  out.series.longitude = spec.longitude;
  out.series.start = start;
  out.series.gpp.resize(days);
  out.series.qc_fraction.assign(days, 1.0);

  // Greenness follows a double-logistic phenology (green-up near day 120,
  // senescence near day 280, shifted half a year south of the equator).
  auto phenology = [&](const Date& d) {
    double doy = static_cast<double>(d.day_of_year());
    if (spec.latitude < 0.0) doy = std::fmod(doy + 182.0, 365.0);
    return 1.0 / (1.0 + std::exp(-(doy - 120.0) / 10.0)) -
           1.0 / (1.0 + std::exp(-(doy - 280.0) / 12.0));
  };

  std::vector<std::string> names = {"RAD", "S2_PC1", "MOD11A1_dt"};
  for (std::size_t k = 0; k < spec.nuisance_features; ++k) {
    names.push_back("NOISE_" + std::to_string(k + 1));
  }
  Matrix values(days, names.size());
  for (std::size_t t = 0; t < days; ++t) {
    const double seasonal = rad[t] / rad_max;
    const double eps = spec.noise_std * rng.normal();
    out.series.gpp[t] = std::max(0.0, spec.amplitude * seasonal * (1.0 + eps) * factor[t]);
    values(t, 0) = rad[t];
    values(t, 1) = 2.0 * phenology(start.plus_days(static_cast<long>(t))) - 1.0 +
                   spec.greenness_noise * rng.normal();
    values(t, 2) = 10.0 * (1.0 - factor[t]) + spec.stress_noise * rng.normal();
    for (std::size_t k = 0; k < spec.nuisance_features; ++k) values(t, 3 + k) = rng.normal();
  }
  out.table = FeatureTable(std::move(names), std::move(values));
  out.truth = std::move(truth);
  return out;
}

}  // namespace fluxrnn
