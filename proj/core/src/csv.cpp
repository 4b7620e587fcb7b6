#include "fluxrnn/csv.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line_no, std::string_view column) {
  if (cell.empty()) return kMissing;
  double v = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || std::isnan(v)) {
    throw ParseError(line_no, "cannot parse '" + std::string(cell) + "' in column '" +
                                  std::string(column) + "'");
  }
  return v;
}

}  // namespace

SiteData parse_feature_csv(std::istream& in, const std::string& site_id, double latitude,
                           double longitude) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  if (header.size() < 3 || header[0] != "date" || header[1] != "gpp" || header[2] != "qc") {
    throw ParseError(1, "header must start with date,gpp,qc");
  }
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 3; i < header.size(); ++i) {
    std::string name(header[i]);
    if (name.empty()) throw ParseError(1, "empty feature name");
    if (!seen.insert(name).second) throw DuplicateFeature(name);
    names.push_back(std::move(name));
  }

  SiteData out;
  out.series.site_id = site_id;
  out.series.latitude = latitude;
  out.series.longitude = longitude;
  std::vector<double> values;
  std::optional<Date> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                    std::to_string(cells.size()));
    }
    Date date;
    try {
      date = Date::parse(cells[0]);
    } catch (const PreconditionViolation& e) {
      throw ParseError(line_no, e.what());
    }
    if (previous) {
      if (date != previous->plus_days(1)) throw NonConsecutiveDates(line_no);
    } else {
      out.series.start = date;
    }
    previous = date;
    out.series.gpp.push_back(parse_cell(cells[1], line_no, "gpp"));
    out.series.qc_fraction.push_back(parse_cell(cells[2], line_no, "qc"));
    for (std::size_t i = 3; i < cells.size(); ++i) {
      values.push_back(parse_cell(cells[i], line_no, header[i]));
    }
  }
  const std::size_t rows = out.series.size();
  out.table = FeatureTable(std::move(names), Matrix(rows, header.size() - 3, std::move(values)));
  return out;
}

SiteData load_feature_csv(const std::filesystem::path& path, const std::string& site_id,
                          double latitude, double longitude) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_feature_csv(in, site_id, latitude, longitude);
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_feature_csv(const SiteSeries& series, const FeatureTable& table) {
  series.validate();
  if (table.rows() != series.size()) throw LengthMismatch("table rows differ from series length");
  std::string out = "date,gpp,qc";
  for (const auto& n : table.names()) out += "," + n;
  out += '\n';
  for (std::size_t r = 0; r < series.size(); ++r) {
    out += series.date_at(r).to_string();
    out += ',' + format_double(series.gpp[r]);
    out += ',' + format_double(series.qc_fraction[r]);
    for (double v : table.row(r)) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const SiteSeries& series,
                       const FeatureTable& table) {
  write_file_atomic(path, format_feature_csv(series, table));
}

std::string format_mask_csv(const ExtremeMask& mask) {
  std::string out = "date,flag\n";
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out += mask.date_at(i).to_string();
    out += mask.flags[i] ? ",1\n" : ",0\n";
  }
  return out;
}

ExtremeMask load_mask_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || (line != "date,flag" && line != "date,flag\r")) {
    throw ParseError(1, "header must be date,flag");
  }
  ExtremeMask mask;
  std::optional<Date> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != 2 || (cells[1] != "0" && cells[1] != "1")) {
      throw ParseError(line_no, "expected date,0|1");
    }
    Date date;
    try {
      date = Date::parse(cells[0]);
    } catch (const PreconditionViolation& e) {
      throw ParseError(line_no, e.what());
    }
    if (previous && date != previous->plus_days(1)) throw NonConsecutiveDates(line_no);
    if (!previous) mask.start = date;
    previous = date;
    mask.flags.push_back(cells[1] == "1" ? 1 : 0);
  }
  return mask;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fluxrnn
