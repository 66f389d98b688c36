#include "icefreq/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "icefreq/stats.hpp"

namespace icefreq {

namespace {

std::string join_dates(const std::vector<Date>& dates, std::size_t cap = 20) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dates.size() && i < cap; ++i) {
    if (i) os << ", ";
    os << to_string(dates[i]);
  }
  if (dates.size() > cap) os << ", +" << dates.size() - cap << " more";
  return os.str();
}

using FieldGet = std::optional<double> (*)(const DailyRecord&);
using FieldSet = void (*)(DailyRecord&, double);

// Shared gap-fill walk over the target span. offset_for returns the value
// adjustment per calendar month (nullopt = no offset known for that month).
FillResult fill_gaps(const StationSeries& target, const StationSeries& donor,
                     FieldGet get, FieldSet set, bool use_monthly_offset) {
  FillResult out;
  std::array<double, 13> offset_sum{};
  std::array<long, 13> offset_n{};
  if (use_monthly_offset) {
    for (const auto& r : target.records()) {
      const auto tv = get(r);
      if (!tv) continue;
      const auto dv = donor.find(r.date) ? get(*donor.find(r.date)) : std::nullopt;
      if (!dv) continue;
      const unsigned m = month_of(r.date);
      offset_sum[m] += *tv - *dv;
      offset_n[m] += 1;
    }
  }

  std::vector<DailyRecord> records = target.records();
  if (records.empty()) {
    out.series = target;
    return out;
  }
  const Date first = records.front().date;
  const Date last = records.back().date;

  // Donor dates inside the target span that the target lacks entirely count
  // as gaps too.
  std::map<Date, DailyRecord> by_date;
  for (const auto& r : records) by_date[r.date] = r;
  for (const auto& r : donor.records())
    if (r.date >= first && r.date <= last && !by_date.count(r.date))
      by_date[r.date] = DailyRecord{r.date, std::nullopt, std::nullopt};

  for (auto& [date, rec] : by_date) {
    if (get(rec)) continue;  // originally present values stay untouched
    const DailyRecord* drec = donor.find(date);
    const std::optional<double> dv = drec ? get(*drec) : std::nullopt;
    if (!dv) {
      out.still_missing.push_back(date);
      continue;
    }
    double v = *dv;
    if (use_monthly_offset) {
      const unsigned m = month_of(date);
      if (offset_n[m] == 0)
        throw Error("no coincident days with donor '" + donor.station_id() +
                    "' in calendar month " + std::to_string(m) +
                    "; cannot derive offset for " + to_string(date));
      v += offset_sum[m] / static_cast<double>(offset_n[m]);
    }
    set(rec, v);
    out.filled.push_back({date, v});
  }

  std::vector<DailyRecord> merged;
  merged.reserve(by_date.size());
  for (auto& [date, rec] : by_date) merged.push_back(rec);
  out.series = StationSeries(target.station_id(), std::move(merged));
  return out;
}

}  // namespace

FillResult fill_gaps_temperature(const StationSeries& target, const StationSeries& donor) {
  return fill_gaps(
      target, donor,
      [](const DailyRecord& r) { return r.tmean; },
      [](DailyRecord& r, double v) { r.tmean = v; },
      /*use_monthly_offset=*/true);
}

FillResult fill_gaps_precip(const StationSeries& target, const StationSeries& donor) {
  return fill_gaps(
      target, donor,
      [](const DailyRecord& r) { return r.precip; },
      [](DailyRecord& r, double v) { r.precip = v; },
      /*use_monthly_offset=*/false);
}

double winter_precip(const StationSeries& s, const SeasonWindow& w) {
  std::vector<Date> missing;
  double ddf_signed = 0;  // S(d): signed freezing degree-days from window start
  double acc = 0;
  bool frozen = false;
  for (Date d = w.start; d <= w.end; ++d) {
    const DailyRecord* r = s.find(d);
    if (!r || !r->tmean || !r->precip) {
      missing.push_back(d);
      continue;
    }
    ddf_signed += -*r->tmean;
    if (!frozen && ddf_signed > 0) frozen = true;
    if (frozen) {
      if (ddf_signed <= 0) {
        // early-winter melt-out: snow to date is lost, restart accumulation
        acc = 0;
        frozen = false;
      } else {
        acc += *r->precip;
      }
    }
  }
  if (!missing.empty())
    throw Error("winter_precip: station " + s.station_id() +
                " missing tmean/precip on " + join_dates(missing));
  return acc;
}

double degree_days_freezing(const StationSeries& s, const SeasonWindow& w) {
  std::vector<Date> missing;
  double ddf = 0;
  for (Date d = w.start; d <= w.end; ++d) {
    const auto t = s.tmean_on(d);
    if (!t) {
      missing.push_back(d);
      continue;
    }
    ddf += std::max(0.0, -*t);
  }
  if (!missing.empty())
    throw Error("degree_days_freezing: station " + s.station_id() +
                " missing tmean on " + join_dates(missing));
  return ddf;
}

std::optional<double> melt_test(const StationSeries& s, int breakup_year) {
  const Date start = make_date(breakup_year, 1, 1);
  const Date end = make_date(breakup_year, 6, 30);
  double cum = 0;
  std::optional<Date> d40, d150;
  std::vector<Date> missing;
  for (Date d = start; d <= end; ++d) {
    const auto t = s.tmean_on(d);
    if (!t) {
      missing.push_back(d);
      continue;
    }
    if (!missing.empty()) continue;  // only report, accumulation already broken
    cum += std::max(0.0, *t);
    if (!d40 && cum >= 40.0) d40 = d;
    if (!d150 && cum >= 150.0) {
      d150 = d;
      break;  // later days cannot change the answer
    }
  }
  if (!d150 && !missing.empty())
    throw Error("melt_test: station " + s.station_id() + " missing tmean on " +
                join_dates(missing));
  if (!d150) return std::nullopt;  // spring never reached 150 DDT: undefined
  return static_cast<double>(*d150 - *d40);
}

std::vector<double> standardize(std::span<const double> values,
                                std::span<const double> baseline) {
  const double m = mean(baseline);
  const double sd = sample_sd(baseline);
  if (sd == 0) throw Error("standardize: zero baseline variance");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - m) / sd);
  return out;
}

std::vector<double> percent_of_average(std::span<const double> values,
                                       std::span<const double> baseline) {
  const double m = mean(baseline);
  if (m == 0) throw Error("percent_of_average: zero baseline mean");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v / m);
  return out;
}

Pca2 first_pc(std::span<const double> x1, std::span<const double> x2,
              std::array<double, 2> favorable) {
  if (x1.size() != x2.size()) throw Error("first_pc: length mismatch");
  if (x1.size() < 3) throw Error("first_pc: need at least 3 points");
  Pca2 pc;
  pc.correlation = pearson_r(x1, x2);
  const double r = pc.correlation;
  // 2x2 correlation matrix [[1, r], [r, 1]]: eigenvalues 1 +- r, the larger
  // is 1 + |r| with eigenvector (1, sign r)/sqrt2.
  const double s = r >= 0 ? 1.0 : -1.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  pc.loading = {inv_sqrt2, s * inv_sqrt2};
  pc.variance_share = (1.0 + std::abs(r)) / 2.0;
  const double orient = pc.loading[0] * favorable[0] + pc.loading[1] * favorable[1];
  if (orient < 0) {
    pc.loading[0] = -pc.loading[0];
    pc.loading[1] = -pc.loading[1];
  }
  pc.scores.reserve(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i)
    pc.scores.push_back(pc.loading[0] * x1[i] + pc.loading[1] * x2[i]);
  return pc;
}

}  // namespace icefreq
