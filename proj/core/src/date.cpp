#include "fluxrnn/date.hpp"

#include <charconv>
#include <cstdio>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

namespace {

std::chrono::year_month_day to_ymd(int y, unsigned m, unsigned d) {
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}};
}

template <typename T>
bool parse_digits(std::string_view text, T& out) {
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) : year_(year), month_(month), day_(day) {
  if (!to_ymd(year, month, day).ok()) {
    throw PreconditionViolation("invalid calendar date " + std::to_string(year) + "-" +
                                std::to_string(month) + "-" + std::to_string(day));
  }
}

Date Date::from_sys_days(std::chrono::sys_days days) {
  const std::chrono::year_month_day ymd{days};
  return Date(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
              static_cast<unsigned>(ymd.day()));
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw PreconditionViolation("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
  }
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_digits(iso.substr(0, 4), y) || !parse_digits(iso.substr(5, 2), m) ||
      !parse_digits(iso.substr(8, 2), d)) {
    throw PreconditionViolation("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
  }
  return Date(y, m, d);
}

std::chrono::sys_days Date::to_sys_days() const {
  return std::chrono::sys_days{to_ymd(year_, month_, day_)};
}

int Date::day_of_year() const {
  const auto jan1 = std::chrono::sys_days{to_ymd(year_, 1, 1)};
  return static_cast<int>((to_sys_days() - jan1).count()) + 1;
}

Date Date::plus_days(long days) const {
  return from_sys_days(to_sys_days() + std::chrono::days{days});
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year_, month_, day_);
  return buf;
}

long days_between(const Date& from, const Date& to) {
  return static_cast<long>((to.to_sys_days() - from.to_sys_days()).count());
}

bool is_leap_year(int year) { return std::chrono::year{year}.is_leap(); }

}  // namespace fluxrnn
