#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fluxrnn/extremes.hpp"
#include "fluxrnn/timeseries.hpp"

namespace fluxrnn {

struct SiteData {
  SiteSeries series;
  FeatureTable table;
};

// Wide per-site CSV: header `date,gpp,qc,<features...>`, ISO dates on
// consecutive days, empty cells for missing values. Negative GPP is kept as
// read. Throws ParseError, NonConsecutiveDates, DuplicateFeature.
SiteData parse_feature_csv(std::istream& in, const std::string& site_id = {},
                           double latitude = 0.0, double longitude = 0.0);
SiteData load_feature_csv(const std::filesystem::path& path, const std::string& site_id = {},
                          double latitude = 0.0, double longitude = 0.0);

std::string format_feature_csv(const SiteSeries& series, const FeatureTable& table);
void write_feature_csv(const std::filesystem::path& path, const SiteSeries& series,
                       const FeatureTable& table);

// `date,flag` with flag 0/1.
std::string format_mask_csv(const ExtremeMask& mask);
ExtremeMask load_mask_csv(const std::filesystem::path& path);

// Shortest representation that parses back to the same double; "" for NaN.
std::string format_double(double v);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace fluxrnn
