#pragma once
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icefreq/series.hpp"

namespace icefreq {

// Gap filling ------------------------------------------------------------

struct FilledValue {
  Date date;
  double value = 0;
};

struct FillResult {
  StationSeries series;
  std::vector<FilledValue> filled;  // provenance: every value we inserted
  std::vector<Date> still_missing;  // donor missing too; reported, never zeroed
};

// Missing target temperatures are replaced by donor + monthly offset, where
// the offset for a calendar month is mean(target - donor) over all coincident
// days of that month across the full record. Throws when a fill is needed in
// a month with no coincident days.
FillResult fill_gaps_temperature(const StationSeries& target, const StationSeries& donor);

// Missing target precipitation is replaced by the donor value unmodified.
FillResult fill_gaps_precip(const StationSeries& target, const StationSeries& donor);

// Season statistics -------------------------------------------------------

// Accumulated winter precipitation with the freeze-reset rule. A signed
// freezing-degree-day sum S(d) = sum(0 - tmean) runs from the window start;
// precipitation accumulates only while S > 0, and if S falls back to <= 0
// (early-winter melt-out) the accumulator restarts at zero. Mid-winter warm
// spells that leave S > 0 cause no reset. Requires tmean and precip on every
// window day.
double winter_precip(const StationSeries& s, const SeasonWindow& w);

// Sum over window days of max(0, -tmean): freezing degree-days, thaw days
// contribute zero. Requires tmean on every window day.
double degree_days_freezing(const StationSeries& s, const SeasonWindow& w);

// Days for cumulative thaw degree-days (accumulated from Jan 1 of the breakup
// year) to rise from 40 to 150. A cumulative sum landing exactly on a
// threshold counts as crossed that day. nullopt when 150 is not reached by
// Jun 30 (covariate undefined for that year). Requires tmean Jan 1 - Jun 30.
std::optional<double> melt_test(const StationSeries& s, int breakup_year);

// Scaling -----------------------------------------------------------------

// (v - mean(baseline)) / sd(baseline), sd with n-1 denominator.
std::vector<double> standardize(std::span<const double> values,
                                std::span<const double> baseline);

// v / mean(baseline) ("% of long-term average" in ratio units).
std::vector<double> percent_of_average(std::span<const double> values,
                                       std::span<const double> baseline);

// Principal component -----------------------------------------------------

struct Pca2 {
  std::array<double, 2> loading{};  // unit norm
  double variance_share = 0;        // largest eigenvalue / 2
  double correlation = 0;           // sample Pearson r of the inputs
  std::vector<double> scores;
};

// First principal component of two standardized series via the 2x2
// correlation matrix. The loading is oriented so that the flood-favorable
// direction scores positive; `favorable` gives the sign of "favorable" for
// each input (default: both increasing, which suits precipitation paired
// with freezing degree-days).
Pca2 first_pc(std::span<const double> x1, std::span<const double> x2,
              std::array<double, 2> favorable = {1.0, 1.0});

}  // namespace icefreq
