#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "icefreq/error.hpp"

namespace icefreq {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw Error("mean of empty range");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation, n-1 denominator.
inline double sample_sd(std::span<const double> v) {
  if (v.size() < 2) throw Error("sample sd needs at least 2 values");
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("pearson_r: length mismatch");
  if (a.size() < 2) throw Error("pearson_r needs at least 2 values");
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) throw Error("pearson_r: zero variance input");
  return sab / std::sqrt(saa * sbb);
}

// Quantile by linear interpolation between order statistics: with sorted
// values x_1..x_n, the q-quantile sits at rank h = (n-1)q + 1 and is
// interpolated between x_floor(h) and x_floor(h)+1 (R type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty range");
  if (q < 0 || q > 1) throw Error("quantile level outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

inline double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, q);
}

// Lower sample median: smallest value whose empirical CDF reaches 1/2.
// Matches the Kaplan-Meier median convention when nothing is censored.
inline double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error("median of empty range");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

// Chi-square(1 dof) survival function: P(X > x) for X = Z^2.
inline double chisq1_sf(double x) {
  if (x <= 0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

// Two-sided normal tail: 2 * P(Z > |z|).
inline double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace icefreq
