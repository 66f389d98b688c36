#include "icefreq/series.hpp"

#include <algorithm>

namespace icefreq {

StationSeries::StationSeries(std::string station_id, std::vector<DailyRecord> records)
    : id_(std::move(station_id)), records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < records_.size(); ++i)
    if (records_[i].date == records_[i - 1].date)
      throw Error("station " + id_ + ": duplicate date " + to_string(records_[i].date));
  for (const auto& r : records_)
    if (r.precip && *r.precip < 0)
      throw Error("station " + id_ + ": negative precipitation on " + to_string(r.date));
}

const DailyRecord* StationSeries::find(Date d) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), d,
      [](const DailyRecord& r, Date date) { return r.date < date; });
  if (it == records_.end() || it->date != d) return nullptr;
  return &*it;
}

std::optional<double> StationSeries::tmean_on(Date d) const {
  const DailyRecord* r = find(d);
  return r ? r->tmean : std::nullopt;
}

std::optional<double> StationSeries::precip_on(Date d) const {
  const DailyRecord* r = find(d);
  return r ? r->precip : std::nullopt;
}

SeasonWindow make_season_window(int breakup_year, MonthDay start, MonthDay end) {
  SeasonWindow w;
  w.breakup_year = breakup_year;
  w.start = make_date(breakup_year - 1, start.month, start.day);
  w.end = make_date(breakup_year, end.month, end.day);
  if (!(w.start < w.end))
    throw Error("season window start must precede end (breakup year " +
                std::to_string(breakup_year) + ")");
  return w;
}

}  // namespace icefreq
