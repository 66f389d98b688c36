#pragma once
#include <compare>
#include <cstdint>
#include <string>

#include "icefreq/error.hpp"

namespace icefreq {

// Calendar date stored as a serial day count (days since 1970-01-01,
// proleptic Gregorian). Day arithmetic is plain integer arithmetic.
struct Date {
  std::int32_t serial = 0;

  auto operator<=>(const Date&) const = default;

  Date& operator++() { ++serial; return *this; }
  Date operator+(int days) const { return Date{serial + days}; }
  Date operator-(int days) const { return Date{serial - days}; }
  int operator-(const Date& o) const { return serial - o.serial; }
};

namespace detail {
// Howard Hinnant's civil-days algorithms.
constexpr std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Ymd { int year; unsigned month; unsigned day; };

constexpr Ymd civil_from_days(std::int32_t z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

constexpr bool is_leap(int y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr unsigned last_day_of_month(int y, unsigned m) {
  constexpr unsigned char days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m != 2 || !is_leap(y) ? days[m - 1] : 29;
}
}  // namespace detail

inline Date make_date(int year, unsigned month, unsigned day) {
  if (month < 1 || month > 12 || day < 1 || day > detail::last_day_of_month(year, month))
    throw Error("invalid calendar date " + std::to_string(year) + "-" +
                std::to_string(month) + "-" + std::to_string(day));
  return Date{detail::days_from_civil(year, month, day)};
}

inline int year_of(Date d) { return detail::civil_from_days(d.serial).year; }
inline unsigned month_of(Date d) { return detail::civil_from_days(d.serial).month; }
inline unsigned day_of(Date d) { return detail::civil_from_days(d.serial).day; }

// ISO-8601, YYYY-MM-DD.
std::string to_string(Date d);
Date parse_date(const std::string& s);

}  // namespace icefreq
