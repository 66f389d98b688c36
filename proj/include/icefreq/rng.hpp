#pragma once
#include <cmath>
#include <cstdint>

namespace icefreq {

// Counter-based random numbers. Every draw is a pure function of
// (stream key, draw index), so work can be split across threads in any
// order and still produce bit-identical results. The generator is the
// SplitMix64 sequence: state walks a Weyl sequence and the output is the
// Stafford mix13 finalizer of the state.

namespace rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct StreamKey {
  std::uint64_t v = 0;
};

// Root key for a named stage of a run; tags keep stages statistically
// disjoint even under the same master seed.
constexpr StreamKey stream_root(std::uint64_t seed, std::uint64_t tag) {
  return {mix64(mix64(seed + kGamma) ^ (tag * 0xD1B54A32D192ED03ull + kGamma))};
}

// Substream for one unit of work (a bootstrap replicate, a (model, replicate)
// pair, ...). Chain as often as needed.
constexpr StreamKey substream(StreamKey k, std::uint64_t index) {
  return {mix64(k.v ^ (index * 0xD1B54A32D192ED03ull + kGamma))};
}

// n-th draw of a stream.
constexpr std::uint64_t draw_u64(StreamKey k, std::uint64_t n) {
  return mix64(k.v + (n + 1) * kGamma);
}

// Bernoulli draws compare the top 53 bits of a draw against an integer
// threshold; ceil maps the open interval correctly so that
// (u >> 11) < threshold(p)  <=>  (u >> 11) * 2^-53 < p  exactly.
inline std::uint64_t bernoulli_threshold(double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return 1ull << 53;
  return static_cast<std::uint64_t>(std::ceil(std::ldexp(p, 53)));
}

// Stage tags.
inline constexpr std::uint64_t kTagBootstrap = 0xB007;
inline constexpr std::uint64_t kTagModelDraw = 0xD4A3;
inline constexpr std::uint64_t kTagSimulate = 0x51A7;
inline constexpr std::uint64_t kTagTest = 0x7E57;

}  // namespace rng

// Stateful convenience wrapper over the counter generator.
class Rng {
 public:
  explicit Rng(rng::StreamKey k) : key_(k) {}
  Rng(std::uint64_t seed, std::uint64_t tag) : key_(rng::stream_root(seed, tag)) {}

  std::uint64_t u64() { return rng::draw_u64(key_, n_++); }

  double u01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return (u64() >> 11) < rng::bernoulli_threshold(p); }

  // Uniform integer in [0, n) via multiply-shift; bias is O(n / 2^64).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(u64()) * n) >> 64);
  }

  // Box-Muller; consumes exactly two draws per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01(), u2 = u01();
    if (u1 <= 0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  rng::StreamKey key_;
  std::uint64_t n_ = 0;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace icefreq
