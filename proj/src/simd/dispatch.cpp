#include <atomic>
#include <cstdlib>
#include <string_view>

#include "defrauder/error.hpp"
#include "defrauder/simd/kernels.hpp"

namespace defrauder::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(DEFRAUDER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("DEFRAUDER_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return &detail::scalar_table();
    if (want == "avx2" && backend_supported(Backend::Avx2)) return &kernels_for(Backend::Avx2);
    if (want == "neon" && backend_supported(Backend::Neon)) return &kernels_for(Backend::Neon);
  }
  if (backend_supported(Backend::Avx2)) return &kernels_for(Backend::Avx2);
  if (backend_supported(Backend::Neon)) return &kernels_for(Backend::Neon);
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

}  // namespace

const char* backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
    case Backend::Neon:
#if defined(DEFRAUDER_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Backend b) {
  if (!backend_supported(b))
    throw Error(Errc::InvalidArgument, std::string("SIMD backend not available: ") + backend_name(b));
  switch (b) {
#if defined(DEFRAUDER_HAVE_AVX2)
    case Backend::Avx2: return detail::avx2_table();
#endif
#if defined(DEFRAUDER_HAVE_NEON)
    case Backend::Neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

const KernelTable& kernels() noexcept { return *active_slot().load(std::memory_order_relaxed); }

Backend active_backend() noexcept { return kernels().backend; }

void set_active_backend(Backend b) { active_slot().store(&kernels_for(b), std::memory_order_relaxed); }

}  // namespace defrauder::simd
