#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace fluxrnn {

// A proleptic Gregorian calendar day without time zone.
class Date {
 public:
  Date() = default;  // 1970-01-01
  // Throws PreconditionViolation on an invalid calendar date.
  Date(int year, unsigned month, unsigned day);

  static Date from_sys_days(std::chrono::sys_days days);
  // Strict YYYY-MM-DD. Throws PreconditionViolation.
  static Date parse(std::string_view iso);

  int year() const noexcept { return year_; }
  unsigned month() const noexcept { return month_; }
  unsigned day() const noexcept { return day_; }

  std::chrono::sys_days to_sys_days() const;
  // 1-based day of year, 1..366.
  int day_of_year() const;
  Date plus_days(long days) const;
  std::string to_string() const;

  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;

 private:
  int year_ = 1970;
  unsigned month_ = 1;
  unsigned day_ = 1;
};

// Signed number of days from `from` to `to`.
long days_between(const Date& from, const Date& to);

bool is_leap_year(int year);

}  // namespace fluxrnn
