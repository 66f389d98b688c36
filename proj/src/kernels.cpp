#include "icefreq/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace icefreq::kernels {

#ifdef ICEFREQ_WITH_AVX2
const Kernel* avx2_impl();
#endif

namespace {

std::atomic<bool> g_force_scalar{false};

bool env_forces_scalar() {
  const char* v = std::getenv("ICEFREQ_NO_SIMD");
  return v && v[0] && v[0] != '0';
}

const Kernel* detect_avx2() {
#ifdef ICEFREQ_WITH_AVX2
  if (__builtin_cpu_supports("avx2")) return avx2_impl();
#endif
  return nullptr;
}

}  // namespace

const Kernel* avx2() {
  static const Kernel* k = detect_avx2();
  return k;
}

const Kernel& active() {
  static const bool env_scalar = env_forces_scalar();
  if (env_scalar || g_force_scalar.load(std::memory_order_relaxed)) return scalar();
  const Kernel* best = avx2();
  return best ? *best : scalar();
}

void set_force_scalar(bool force) { g_force_scalar.store(force, std::memory_order_relaxed); }

}  // namespace icefreq::kernels
