#include "fluxrnn/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_doy(int doy) {
  if (doy < 1 || doy > 366) throw PreconditionViolation("day of year out of range");
}

}  // namespace

SiteLocation site_from_degrees(double latitude_deg, double longitude_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  return {latitude_deg * kDeg, longitude_deg * kDeg};
}

double solar_declination(int doy) {
  check_doy(doy);
  return -kMaxDeclination * std::cos(kTwoPi * (doy + 10) / 365.0);
}

double eccentricity_factor(int doy) {
  check_doy(doy);
  return 1.0 + 0.033 * std::cos(kTwoPi * doy / 365.0);
}

double sunset_hour_angle(double latitude, double declination) {
  const double x = std::clamp(-std::tan(latitude) * std::tan(declination), -1.0, 1.0);
  return std::acos(x);
}

double daily_toa_mean(double latitude, int doy) {
  if (std::abs(latitude) > std::numbers::pi / 2.0 + 1e-12) {
    throw PreconditionViolation("latitude outside [-pi/2, pi/2]");
  }
  const double decl = solar_declination(doy);
  const double ws = sunset_hour_angle(latitude, decl);
  const double h = kSolarConstant * eccentricity_factor(doy) / std::numbers::pi *
                   (ws * std::sin(latitude) * std::sin(decl) +
                    std::cos(latitude) * std::cos(decl) * std::sin(ws));
  return std::max(0.0, h);
}

double daily_clearsky_mean(const SiteLocation& site, const Date& date, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw PreconditionViolation("tau must lie in (0, 1]");
  return tau * daily_toa_mean(site.latitude, date.day_of_year());
}

RadiationSeries clearsky_series(const SiteLocation& site, const Date& start, std::size_t days,
                                double tau) {
  RadiationSeries out{start, {}};
  out.values.reserve(days);
  for (std::size_t i = 0; i < days; ++i) {
    out.values.push_back(daily_clearsky_mean(site, start.plus_days(static_cast<long>(i)), tau));
  }
  return out;
}

}  // namespace fluxrnn
