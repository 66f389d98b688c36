#include "icefreq/date.hpp"

#include <cstdio>

namespace icefreq {

std::string to_string(Date d) {
  const auto ymd = detail::civil_from_days(d.serial);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", ymd.year, ymd.month, ymd.day);
  return buf;
}

Date parse_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
    throw Error("bad ISO-8601 date: '" + s + "'");
  return make_date(y, m, d);
}

}  // namespace icefreq
