#pragma once

// Dense vector kernels used by embedding training, text cosines and group
// dispersion. Each kernel has a scalar reference implementation plus
// AVX2/FMA (x86-64) and NEON (AArch64) variants. The variant is picked once
// at runtime from CPU features; DEFRAUDER_SIMD=scalar|avx2|neon overrides it.
//
// Variants may reassociate sums, so results agree with the scalar reference
// to rounding, not bit-for-bit. A given backend is deterministic.

#include <cassert>
#include <cstddef>
#include <span>

namespace defrauder::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy_f32)(float alpha, const float* x, float* y, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // sum_k (a_k - b_k)^2
  double (*sqdist_f64)(const double* a, const double* b, std::size_t n);
};

const char* backend_name(Backend b) noexcept;
bool backend_supported(Backend b) noexcept;

// Kernel table for a specific backend; throws Error(InvalidArgument) when the
// backend is not compiled in or not supported by this CPU.
const KernelTable& kernels_for(Backend b);

// The active table.
const KernelTable& kernels() noexcept;
Backend active_backend() noexcept;
void set_active_backend(Backend b);

inline float dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return kernels().dot_f32(a.data(), b.data(), a.size());
}

inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  assert(x.size() == y.size());
  kernels().axpy_f32(alpha, x.data(), y.data(), x.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().dot_f64(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  kernels().axpy_f64(alpha, x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().sqdist_f64(a.data(), b.data(), a.size());
}

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(DEFRAUDER_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(DEFRAUDER_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

}  // namespace defrauder::simd
