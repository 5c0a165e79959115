#pragma once

// Data-parallel arithmetic kernels with a scalar reference implementation and
// an AVX2/FMA variant chosen at runtime. Every variant is checked against the
// scalar reference in tests/test_simd_kernels.cpp.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace pulsedtls::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Row-major 2x2 and 4x4 real matrices.
using Mat2 = std::array<double, 4>;
using Mat4 = std::array<double, 16>;

struct KernelTable {
  Isa isa;
  /// out[i] = sin^2(x[i] / 2)
  void (*sin2_half)(const double* x, double* out, std::size_t n);
  /// acc[i] *= b[i]
  void (*multiply)(double* acc, const double* b, std::size_t n);
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// In-place y = M x for n column vectors stored as 2 component arrays.
  void (*mat2_apply)(const Mat2& m, double* c0, double* c1, std::size_t n);
  /// In-place y = M x for n column vectors stored as 4 component arrays.
  void (*mat4_apply)(const Mat4& m, double* c0, double* c1, double* c2, double* c3, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Active table: AVX2 when available, unless PULSEDTLS_ISA=scalar. Resolved
/// once per process.
const KernelTable& kernels();

inline void sin2_half(std::span<const double> x, std::span<double> out) {
  kernels().sin2_half(x.data(), out.data(), x.size());
}
inline void multiply_inplace(std::span<double> acc, std::span<const double> b) {
  kernels().multiply(acc.data(), b.data(), acc.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace pulsedtls::simd
