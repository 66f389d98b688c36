// AVX2 variants of the simulation kernels. Four 64-bit lanes walk the
// SplitMix64 Weyl sequence in parallel; all arithmetic is integer, so the
// results match the scalar kernel bit for bit.
#include "icefreq/kernels.hpp"

#ifdef ICEFREQ_WITH_AVX2
#include <immintrin.h>

namespace icefreq::kernels {

namespace {

// 64x64 -> low 64 multiply from 32-bit partial products (no native
// _mm256_mullo_epi64 below AVX-512).
inline __m256i mullo64(__m256i a, __m256i b) {
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i cross = _mm256_add_epi64(
      _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b),
      _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32)));
  return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64_vec(__m256i x) {
  const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull));
  const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull));
  x = mullo64(_mm256_xor_si256(x, _mm256_srli_epi64(x, 30)), c1);
  x = mullo64(_mm256_xor_si256(x, _mm256_srli_epi64(x, 27)), c2);
  return _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
}

// state for draw index n is key + (n+1)*gamma
inline __m256i state4(rng::StreamKey key, std::uint64_t n0) {
  const std::uint64_t base = key.v;
  return _mm256_set_epi64x(
      static_cast<long long>(base + (n0 + 4) * rng::kGamma),
      static_cast<long long>(base + (n0 + 3) * rng::kGamma),
      static_cast<long long>(base + (n0 + 2) * rng::kGamma),
      static_cast<long long>(base + (n0 + 1) * rng::kGamma));
}

void draw_block_avx2(rng::StreamKey key, std::uint64_t n0, std::size_t count,
                     std::uint64_t* out) {
  const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * rng::kGamma));
  __m256i state = state4(key, n0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), mix64_vec(state));
    state = _mm256_add_epi64(state, step);
  }
  for (; i < count; ++i) out[i] = rng::draw_u64(key, n0 + i);
}

void bernoulli_bits_avx2(rng::StreamKey key, const std::uint64_t* thresholds,
                         std::size_t n, std::uint64_t* words) {
  const std::size_t nwords = (n + 63) / 64;
  for (std::size_t w = 0; w < nwords; ++w) words[w] = 0;
  const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * rng::kGamma));
  __m256i state = state4(key, 0);
  std::size_t t = 0;
  // 4-draw blocks never straddle a 64-bit output word (64 % 4 == 0)
  for (; t + 4 <= n; t += 4) {
    const __m256i u = _mm256_srli_epi64(mix64_vec(state), 11);
    const __m256i thr = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(thresholds + t));
    // both sides < 2^53, so the signed compare is the unsigned compare
    const __m256i gt = _mm256_cmpgt_epi64(thr, u);
    const std::uint64_t mask =
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(gt)));
    words[t >> 6] |= mask << (t & 63);
    state = _mm256_add_epi64(state, step);
  }
  for (; t < n; ++t) {
    const std::uint64_t u = rng::draw_u64(key, t) >> 11;
    if (u < thresholds[t]) words[t >> 6] |= 1ull << (t & 63);
  }
}

}  // namespace

const Kernel* avx2_impl() {
  static const Kernel k{"avx2", &draw_block_avx2, &bernoulli_bits_avx2};
  return &k;
}

}  // namespace icefreq::kernels

#endif  // ICEFREQ_WITH_AVX2
