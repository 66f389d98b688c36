#pragma once
#include <cstddef>
#include <cstdint>

#include "icefreq/rng.hpp"

namespace icefreq::kernels {

// Inner loops of the Monte Carlo simulation, in scalar reference form and
// (on x86 with AVX2) a vectorized variant selected at runtime. Both paths
// are pure integer arithmetic on the counter RNG, so their outputs are
// bit-identical; the equivalence tests assert exact equality.
struct Kernel {
  const char* name;

  // out[i] = draw_u64(key, n0 + i) for i in [0, count).
  void (*draw_block)(rng::StreamKey key, std::uint64_t n0, std::size_t count,
                     std::uint64_t* out);

  // Bernoulli bit sequence: bit t of `words` (little-endian bit order,
  // words[t/64] >> (t%64)) is set iff (draw_u64(key, t) >> 11) < thresholds[t].
  // Zeroes the ceil(n/64) output words first.
  void (*bernoulli_bits)(rng::StreamKey key, const std::uint64_t* thresholds,
                         std::size_t n, std::uint64_t* words);
};

const Kernel& scalar();

// nullptr when AVX2 is not compiled in or the CPU lacks it.
const Kernel* avx2();

// Best available kernel; scalar when forced (ICEFREQ_NO_SIMD=1 or
// set_force_scalar(true)).
const Kernel& active();

void set_force_scalar(bool force);

}  // namespace icefreq::kernels
