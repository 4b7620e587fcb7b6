#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fluxrnn/extremes.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fluxrnn {

struct DroughtEvent {
  std::size_t year_offset = 0;  // years after the first simulated year
  int start_doy = 180;
  std::size_t length = 10;  // >= 5 days
  double depth = 0.3;       // GPP multiplier inside the window, in (0, 1)

  friend bool operator==(const DroughtEvent&, const DroughtEvent&) = default;
};

// Desk-scale stand-in for one flux site.
//
// GPP_t = max(0, A * rad_t / max(rad) * (1 + e_t) * d_t) with e_t ~ N(0, noise_std)
// and d_t = depth inside a drought window, 1 elsewhere. Features:
//   RAD         clear-sky radiation at the site latitude
//   S2_PC1      greenness: 2 g_t - 1 + noise, g_t a double-logistic phenology
//   MOD11A1_dt  stress: 10 (1 - d_t) + noise
//   NOISE_<i>   standard normal, independent of the target
struct SynthSpec {
  std::string site_id = "SYN-01";
  int start_year = 2016;
  std::size_t n_years = 5;
  double latitude = 50.0;  // degrees
  double longitude = 10.0;
  double amplitude = 12.0;
  double noise_std = 0.05;
  double tau = 0.75;
  std::vector<DroughtEvent> droughts;
  double greenness_noise = 0.3;
  double stress_noise = 0.5;
  std::size_t nuisance_features = 2;
  std::uint64_t seed = 7;

  // Throws InvalidSpec.
  void validate() const;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

struct SynthResult {
  SiteSeries series;
  FeatureTable table;
  ExtremeMask truth;  // injected drought days
};

SynthResult synth_generate(const SynthSpec& spec);

}  // namespace fluxrnn
