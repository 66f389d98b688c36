#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace icefreq {

// One step of a Kaplan-Meier survival curve (value after processing `time`).
struct KmStep {
  double time = 0;
  double survival = 1;
  std::uint64_t at_risk = 0;
  std::uint64_t events = 0;
};

// Product-limit estimator over right-censored observations. Ties at a time
// process events before censorings (both count in the at-risk set at that
// time). Censoring-only times contribute no step.
std::vector<KmStep> kaplan_meier(std::span<const double> times,
                                 std::span<const std::uint8_t> event);

// Aggregated input: ascending distinct times with event/censor counts.
struct KmCounts {
  std::vector<double> times;
  std::vector<std::uint64_t> events;
  std::vector<std::uint64_t> censored;
};
std::vector<KmStep> kaplan_meier(const KmCounts& counts);

struct KmMedian {
  bool beyond_horizon = false;
  double value = 0;  // median time, or the horizon when beyond_horizon
};

// Smallest time with S(t) <= 1/2 (lower-median convention; an exact tie at
// 1/2 counts as reached). When S never reaches 1/2 the median lies beyond
// the simulation horizon and the horizon is returned with the flag set.
KmMedian km_median(const std::vector<KmStep>& curve, double horizon);

// Smallest time with S(t) <= 1 - q, i.e. the q-quantile of the wait
// distribution under censoring.
KmMedian km_quantile(const std::vector<KmStep>& curve, double q, double horizon);

}  // namespace icefreq
