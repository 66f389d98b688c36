#include "icefreq/survival.hpp"

#include <algorithm>
#include <numeric>

#include "icefreq/error.hpp"

namespace icefreq {

namespace {
// Tolerance for "reached 1/2": the product-limit value for an exact
// empirical tie can land a few ulps either side of 0.5.
constexpr double kHalfEps = 1e-9;
}  // namespace

std::vector<KmStep> kaplan_meier(std::span<const double> times,
                                 std::span<const std::uint8_t> event) {
  if (times.size() != event.size()) throw Error("kaplan_meier: length mismatch");
  if (times.empty()) throw Error("kaplan_meier: empty sample");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  KmCounts counts;
  for (std::size_t i = 0; i < order.size();) {
    const double t = times[order[i]];
    std::uint64_t d = 0, c = 0;
    for (; i < order.size() && times[order[i]] == t; ++i)
      (event[order[i]] ? d : c) += 1;
    counts.times.push_back(t);
    counts.events.push_back(d);
    counts.censored.push_back(c);
  }
  return kaplan_meier(counts);
}

std::vector<KmStep> kaplan_meier(const KmCounts& counts) {
  std::uint64_t at_risk = 0;
  for (std::size_t i = 0; i < counts.times.size(); ++i)
    at_risk += counts.events[i] + counts.censored[i];
  if (at_risk == 0) throw Error("kaplan_meier: empty sample");

  std::vector<KmStep> curve;
  double s = 1.0;
  for (std::size_t i = 0; i < counts.times.size(); ++i) {
    const std::uint64_t d = counts.events[i];
    if (d > 0) {
      s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
      curve.push_back({counts.times[i], s, at_risk, d});
    }
    at_risk -= d + counts.censored[i];
  }
  return curve;
}

KmMedian km_quantile(const std::vector<KmStep>& curve, double q, double horizon) {
  if (!(q > 0 && q < 1)) throw Error("km_quantile: level outside (0,1)");
  const double target = 1.0 - q;
  for (const KmStep& step : curve)
    if (step.survival <= target + kHalfEps) return {false, step.time};
  return {true, horizon};
}

KmMedian km_median(const std::vector<KmStep>& curve, double horizon) {
  return km_quantile(curve, 0.5, horizon);
}

}  // namespace icefreq
