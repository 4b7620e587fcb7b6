#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fluxrnn/rng.hpp"
#include "fluxrnn/synth.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fixture {

inline fluxrnn::SiteSeries series(const fluxrnn::Date& start, std::vector<double> gpp,
                                  const std::string& id = "S1") {
  fluxrnn::SiteSeries s;
  s.site_id = id;
  s.latitude = 50.0;
  s.longitude = 10.0;
  s.start = start;
  s.qc_fraction.assign(gpp.size(), 1.0);
  s.gpp = std::move(gpp);
  return s;
}

inline fluxrnn::FeatureTable table(std::vector<std::string> names,
                                   const std::vector<std::vector<double>>& columns) {
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  fluxrnn::Matrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return {std::move(names), std::move(m)};
}

inline fluxrnn::FeatureTable random_table(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  fluxrnn::Rng rng(seed);
  std::vector<std::string> names;
  fluxrnn::Matrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) names.push_back("F" + std::to_string(c));
  for (auto& v : m.data()) v = rng.normal();
  return {names, m};
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  fluxrnn::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

struct Windows {
  fluxrnn::WindowedDataset train;
  fluxrnn::WindowedDataset test;
};

// Synthetic site with every feature z-scored on the training years, cut into
// train and test windows. `max_train` keeps the earliest training windows.
inline Windows synth_windows(const fluxrnn::SynthSpec& spec, std::size_t length,
                             const fluxrnn::SplitSpec& split, std::size_t max_train = 0) {
  const fluxrnn::SynthResult r = fluxrnn::synth_generate(spec);
  fluxrnn::FeatureTable t = r.table;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (!split.train_years.contains(r.series.date_at(i).year())) continue;
      sum += t(i, c);
      ++n;
    }
    const double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (!split.train_years.contains(r.series.date_at(i).year())) continue;
      sq += (t(i, c) - mean) * (t(i, c) - mean);
    }
    const double sd = std::sqrt(sq / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < t.rows(); ++i) t(i, c) = (t(i, c) - mean) / sd;
  }
  Windows w{fluxrnn::build_windows(r.series, t, length, split, fluxrnn::SplitPart::kTrain),
            fluxrnn::build_windows(r.series, t, length, split, fluxrnn::SplitPart::kTest)};
  if (max_train > 0 && w.train.samples.size() > max_train) w.train.samples.resize(max_train);
  return w;
}

// Windows whose target is a fixed linear filter of the inputs:
// y = 0.5 + sum_t 0.5^(L-1-t) w . x_t, inputs and w standard normal, w scaled
// by 1/sqrt(features).
inline fluxrnn::WindowedDataset linear_teacher(std::size_t n, std::size_t length,
                                               std::size_t features, std::uint64_t seed) {
  fluxrnn::Rng rng(seed);
  std::vector<double> w(features);
  for (auto& v : w) v = rng.normal() / std::sqrt(static_cast<double>(features));
  fluxrnn::WindowedDataset ds;
  ds.length = length;
  ds.n_features = features;
  for (std::size_t f = 0; f < features; ++f) ds.feature_names.push_back("X" + std::to_string(f + 1));
  for (std::size_t i = 0; i < n; ++i) {
    fluxrnn::Sample s;
    s.input.resize(length * features);
    for (auto& v : s.input) v = rng.normal();
    double y = 0.5;
    for (std::size_t t = 0; t < length; ++t) {
      const double decay = std::pow(0.5, static_cast<double>(length - 1 - t));
      for (std::size_t f = 0; f < features; ++f) y += decay * w[f] * s.input[t * features + f];
    }
    s.target = y;
    s.target_date = fluxrnn::Date(2016, 1, 1).plus_days(static_cast<long>(i));
    s.site_id = "TEACHER";
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace fixture
