#include <cmath>

#include "pulsedtls/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace pulsedtls::simd {

namespace scalar {

void sin2_half(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(0.5 * x[i]);
    out[i] = s * s;
  }
}

void multiply(double* acc, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] *= b[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void mat2_apply(const Mat2& m, double* c0, double* c1, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = c0[i], x1 = c1[i];
    c0[i] = m[0] * x0 + m[1] * x1;
    c1[i] = m[2] * x0 + m[3] * x1;
  }
}

void mat4_apply(const Mat4& m, double* c0, double* c1, double* c2, double* c3, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = c0[i], x1 = c1[i], x2 = c2[i], x3 = c3[i];
    c0[i] = m[0] * x0 + m[1] * x1 + m[2] * x2 + m[3] * x3;
    c1[i] = m[4] * x0 + m[5] * x1 + m[6] * x2 + m[7] * x3;
    c2[i] = m[8] * x0 + m[9] * x1 + m[10] * x2 + m[11] * x3;
    c3[i] = m[12] * x0 + m[13] * x1 + m[14] * x2 + m[15] * x3;
  }
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, scalar::sin2_half, scalar::multiply, scalar::dot, scalar::mat2_apply,
                                 scalar::mat4_apply};
  return table;
}

}  // namespace pulsedtls::simd
