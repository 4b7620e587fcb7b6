#pragma once

#include <cstddef>
#include <vector>

#include "fluxrnn/date.hpp"

namespace fluxrnn {

inline constexpr double kSolarConstant = 1361.0;  // W m-2
inline constexpr double kDefaultTransmittance = 0.75;
inline constexpr double kMaxDeclination = 0.4093;  // rad

struct SiteLocation {
  double latitude = 0.0;   // radians
  double longitude = 0.0;  // radians, not used by the daily model
};

SiteLocation site_from_degrees(double latitude_deg, double longitude_deg);

struct RadiationSeries {
  Date start;
  std::vector<double> values;  // W m-2, >= 0
};

// Solar declination (rad) for a day of year in 1..366.
double solar_declination(int doy);

// Earth-Sun distance correction factor.
double eccentricity_factor(int doy);

// Sunset hour angle in [0, pi] for latitude and declination in radians.
double sunset_hour_angle(double latitude, double declination);

// Daily mean top-of-atmosphere irradiance in W m-2; zero during polar night.
double daily_toa_mean(double latitude, int doy);

// Daily mean clear-sky shortwave radiation: `tau` times the TOA daily mean.
double daily_clearsky_mean(const SiteLocation& site, const Date& date,
                           double tau = kDefaultTransmittance);

RadiationSeries clearsky_series(const SiteLocation& site, const Date& start, std::size_t days,
                                double tau = kDefaultTransmittance);

}  // namespace fluxrnn
