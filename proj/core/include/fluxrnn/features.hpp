#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fluxrnn {

// Spectral indices with built-in formulas.
enum class VegetationIndex { kKNDVI, kNDMI, kMCARI, kDSWI };

std::string_view vi_name(VegetationIndex vi);
std::optional<VegetationIndex> parse_vi(std::string_view name);

// Spatially averaged NBAR reflectances for one date. Missing bands are NaN.
struct BandMeans {
  double green = 0.0;
  double red = 0.0;
  double red_edge1 = 0.0;
  double nir = 0.0;
  double swir1 = 0.0;
};

// Throws MissingBand or DivisionByZero.
double compute_vi(VegetationIndex vi, const BandMeans& bands);

// 10 log10(linear). Throws NonPositiveInput.
double s1_to_db(double linear);

// Terrain-flattened backscatter in linear power units.
struct GammaNaught {
  double vv = 0.0;
  double vh = 0.0;
};

// Dual-pol radar vegetation index 4 vh / (vv + vh), in [0, 4].
double dprvi(const GammaNaught& g);

}  // namespace fluxrnn
