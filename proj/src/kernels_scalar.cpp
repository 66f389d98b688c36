#include "icefreq/kernels.hpp"

namespace icefreq::kernels {

namespace {

void draw_block_scalar(rng::StreamKey key, std::uint64_t n0, std::size_t count,
                       std::uint64_t* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = rng::draw_u64(key, n0 + i);
}

void bernoulli_bits_scalar(rng::StreamKey key, const std::uint64_t* thresholds,
                           std::size_t n, std::uint64_t* words) {
  const std::size_t nwords = (n + 63) / 64;
  for (std::size_t w = 0; w < nwords; ++w) words[w] = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint64_t u = rng::draw_u64(key, t) >> 11;
    if (u < thresholds[t]) words[t >> 6] |= 1ull << (t & 63);
  }
}

}  // namespace

const Kernel& scalar() {
  static const Kernel k{"scalar", &draw_block_scalar, &bernoulli_bits_scalar};
  return k;
}

}  // namespace icefreq::kernels
