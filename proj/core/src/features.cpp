#include "fluxrnn/features.hpp"

#include <cmath>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

std::string_view vi_name(VegetationIndex vi) {
  switch (vi) {
    case VegetationIndex::kKNDVI: return "kNDVI";
    case VegetationIndex::kNDMI: return "NDMI";
    case VegetationIndex::kMCARI: return "MCARI";
    case VegetationIndex::kDSWI: return "DSWI";
  }
  return "?";
}

std::optional<VegetationIndex> parse_vi(std::string_view name) {
  for (auto vi : {VegetationIndex::kKNDVI, VegetationIndex::kNDMI, VegetationIndex::kMCARI,
                  VegetationIndex::kDSWI}) {
    if (vi_name(vi) == name) return vi;
  }
  return std::nullopt;
}

namespace {

void require(VegetationIndex vi, std::initializer_list<double> bands) {
  for (double b : bands) {
    if (std::isnan(b)) throw MissingBand(std::string(vi_name(vi)));
  }
}

double safe_div(VegetationIndex vi, double num, double den) {
  if (den == 0.0) throw DivisionByZero(std::string(vi_name(vi)));
  return num / den;
}

}  // namespace

double compute_vi(VegetationIndex vi, const BandMeans& b) {
  switch (vi) {
    case VegetationIndex::kKNDVI: {
      require(vi, {b.nir, b.red});
      const double ndvi = safe_div(vi, b.nir - b.red, b.nir + b.red);
      return std::tanh(ndvi * ndvi);
    }
    case VegetationIndex::kNDMI:
      require(vi, {b.nir, b.swir1});
      return safe_div(vi, b.nir - b.swir1, b.nir + b.swir1);
    case VegetationIndex::kMCARI: {
      require(vi, {b.red_edge1, b.red, b.green});
      const double ratio = safe_div(vi, b.red_edge1, b.red);
      return ((b.red_edge1 - b.red) - 0.2 * (b.red_edge1 - b.green)) * ratio;
    }
    case VegetationIndex::kDSWI:
      require(vi, {b.nir, b.green, b.swir1, b.red});
      return safe_div(vi, b.nir + b.green, b.swir1 + b.red);
  }
  throw PreconditionViolation("unknown vegetation index");
}

double s1_to_db(double linear) {
  if (!(linear > 0.0)) throw NonPositiveInput("backscatter must be positive for dB scaling");
  return 10.0 * std::log10(linear);
}

double dprvi(const GammaNaught& g) {
  if (g.vv < 0.0 || g.vh < 0.0) throw NonPositiveInput("backscatter must be non-negative");
  const double den = g.vv + g.vh;
  if (den == 0.0) throw DivisionByZero("DpRVI");
  return 4.0 * g.vh / den;
}

}  // namespace fluxrnn
