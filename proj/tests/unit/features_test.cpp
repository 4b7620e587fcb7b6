#include <gtest/gtest.h>

#include <cmath>

#include "fluxrnn/errors.hpp"
#include "fluxrnn/features.hpp"

using namespace fluxrnn;

namespace {

BandMeans bands(double g, double r, double re1, double n, double s1) { return {g, r, re1, n, s1}; }

}  // namespace

TEST(VegetationIndex, KndviZeroWhenNirEqualsRed) {
  EXPECT_EQ(compute_vi(VegetationIndex::kKNDVI, bands(0.1, 0.3, 0.2, 0.3, 0.2)), 0.0);
}

TEST(VegetationIndex, KndviClosedForm) {
  // tanh((0.4/0.6)^2) = tanh(4/9); long double evaluation as the reference.
  const long double ref = std::tanh(4.0L / 9.0L);
  const double got = compute_vi(VegetationIndex::kKNDVI, bands(0.1, 0.1, 0.2, 0.5, 0.2));
  EXPECT_NEAR(got, static_cast<double>(ref), 1e-15);
  EXPECT_NEAR(got, 0.41732, 1e-5);
}

TEST(VegetationIndex, Ndmi) {
  EXPECT_NEAR(compute_vi(VegetationIndex::kNDMI, bands(0.1, 0.1, 0.1, 0.4, 0.2)), 1.0 / 3.0, 1e-15);
}

TEST(VegetationIndex, McariAndDswi) {
  const BandMeans b = bands(0.08, 0.05, 0.12, 0.4, 0.2);
  EXPECT_DOUBLE_EQ(compute_vi(VegetationIndex::kMCARI, b),
                   ((0.12 - 0.05) - 0.2 * (0.12 - 0.08)) * (0.12 / 0.05));
  EXPECT_DOUBLE_EQ(compute_vi(VegetationIndex::kDSWI, b), (0.4 + 0.08) / (0.2 + 0.05));
}

TEST(VegetationIndex, Errors) {
  EXPECT_THROW(compute_vi(VegetationIndex::kNDMI, bands(0.1, 0.1, 0.1, 0.0, 0.0)), DivisionByZero);
  EXPECT_THROW(compute_vi(VegetationIndex::kMCARI, bands(0.1, 0.0, 0.1, 0.3, 0.1)), DivisionByZero);
  EXPECT_THROW(compute_vi(VegetationIndex::kKNDVI, bands(0.1, NAN, 0.1, 0.3, 0.1)), MissingBand);
}

TEST(VegetationIndex, Names) {
  for (auto vi : {VegetationIndex::kKNDVI, VegetationIndex::kNDMI, VegetationIndex::kMCARI,
                  VegetationIndex::kDSWI}) {
    EXPECT_EQ(parse_vi(vi_name(vi)), vi);
  }
  EXPECT_FALSE(parse_vi("EVI"));
}

TEST(Sentinel1, DecibelScaling) {
  EXPECT_EQ(s1_to_db(1.0), 0.0);
  EXPECT_NEAR(s1_to_db(0.1), -10.0, 1e-14);
  EXPECT_NEAR(s1_to_db(0.5), -3.0102999566398120, 1e-12);
  EXPECT_THROW(s1_to_db(0.0), NonPositiveInput);
  EXPECT_THROW(s1_to_db(-1.0), NonPositiveInput);
}

TEST(Sentinel1, DecibelOfProductIsSum) {
  for (double a : {0.01, 0.3, 2.5, 17.0}) {
    for (double b : {0.02, 0.7, 4.0}) {
      EXPECT_NEAR(s1_to_db(a * b), s1_to_db(a) + s1_to_db(b), 1e-12);
    }
  }
}

TEST(Sentinel1, Dprvi) {
  EXPECT_EQ(dprvi({0.2, 0.2}), 2.0);
  EXPECT_EQ(dprvi({0.2, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(dprvi({0.3, 0.1}), 1.0);
  EXPECT_THROW(dprvi({0.0, 0.0}), DivisionByZero);
  for (double c : {0.5, 3.0, 1e3}) EXPECT_NEAR(dprvi({c * 0.31, c * 0.07}), dprvi({0.31, 0.07}), 1e-14);
}
