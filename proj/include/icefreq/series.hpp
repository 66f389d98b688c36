#pragma once
#include <optional>
#include <string>
#include <vector>

#include "icefreq/date.hpp"

namespace icefreq {

struct DailyRecord {
  Date date;
  std::optional<double> tmean;   // daily mean air temperature, degC
  std::optional<double> precip;  // daily precipitation, mm water equivalent
};

// Daily observations for one station, ordered by date, no duplicates.
class StationSeries {
 public:
  StationSeries() = default;
  StationSeries(std::string station_id, std::vector<DailyRecord> records);

  const std::string& station_id() const { return id_; }
  const std::vector<DailyRecord>& records() const { return records_; }

  // nullptr when the date is absent from the series.
  const DailyRecord* find(Date d) const;

  std::optional<double> tmean_on(Date d) const;
  std::optional<double> precip_on(Date d) const;

 private:
  std::string id_;
  std::vector<DailyRecord> records_;
};

// One winter season attached to the spring in which breakup happens.
// Defaults to Nov 1 of the prior year through Apr 30 of the breakup year.
struct SeasonWindow {
  int breakup_year = 0;
  Date start;
  Date end;
};

struct MonthDay {
  unsigned month = 11;
  unsigned day = 1;
};

SeasonWindow make_season_window(int breakup_year, MonthDay start = {11, 1},
                                MonthDay end = {4, 30});

}  // namespace icefreq
