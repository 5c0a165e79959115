#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace pulsedtls::simd {

namespace avx2 {

namespace {

// pi/2 split in three parts; j * kPio2Hi is exact for |j| < 2^20.
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Mid = 6.07710050630396597660e-11;
constexpr double kPio2Lo = 2.02226624879595063154e-21;
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// Beyond this |x/2| the three-part reduction loses exactness; fall back to libm.
constexpr double kReductionLimit = 1.0e5;

// Minimax coefficients for sin and cos on [-pi/4, pi/4] (Cephes).
constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
                            -1.98412698295895385996e-4, 8.33333333332211858878e-3, -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
                            2.48015872888517045348e-5,  -1.38888888888730564116e-3, 4.16666666666665929218e-2};

inline __m256d poly5(__m256d z, const double (&c)[6]) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
  return p;
}

inline __m256d sin2_half4(__m256d x) {
  const __m256d y = _mm256_mul_pd(x, _mm256_set1_pd(0.5));
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Hi), y);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly5(z, kSin), r);
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), poly5(z, kCos),
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));
  // odd quadrant: sin(y) = +-cos(r); the sign drops out of the square
  const __m256d half_j = _mm256_mul_pd(j, _mm256_set1_pd(0.5));
  const __m256d odd = _mm256_cmp_pd(half_j, _mm256_floor_pd(half_j), _CMP_NEQ_OQ);
  const __m256d s = _mm256_blendv_pd(sin_r, cos_r, odd);
  return _mm256_mul_pd(s, s);
}

void sin2_half_tail(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(0.5 * x[i]);
    out[i] = s * s;
  }
}

}  // namespace

void sin2_half(const double* x, double* out, std::size_t n) {
  const __m256d limit = _mm256_set1_pd(2.0 * kReductionLimit);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d too_big = _mm256_cmp_pd(_mm256_and_pd(v, abs_mask), limit, _CMP_NLT_UQ);
    if (_mm256_movemask_pd(too_big) != 0) {
      sin2_half_tail(x + i, out + i, 4);
      continue;
    }
    _mm256_storeu_pd(out + i, sin2_half4(v));
  }
  sin2_half_tail(x + i, out + i, n - i);
}

void multiply(double* acc, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) acc[i] *= b[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void mat2_apply(const Mat2& m, double* c0, double* c1, std::size_t n) {
  const __m256d m00 = _mm256_set1_pd(m[0]), m01 = _mm256_set1_pd(m[1]);
  const __m256d m10 = _mm256_set1_pd(m[2]), m11 = _mm256_set1_pd(m[3]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(c0 + i);
    const __m256d x1 = _mm256_loadu_pd(c1 + i);
    _mm256_storeu_pd(c0 + i, _mm256_fmadd_pd(m01, x1, _mm256_mul_pd(m00, x0)));
    _mm256_storeu_pd(c1 + i, _mm256_fmadd_pd(m11, x1, _mm256_mul_pd(m10, x0)));
  }
  for (; i < n; ++i) {
    const double x0 = c0[i], x1 = c1[i];
    c0[i] = m[0] * x0 + m[1] * x1;
    c1[i] = m[2] * x0 + m[3] * x1;
  }
}

void mat4_apply(const Mat4& m, double* c0, double* c1, double* c2, double* c3, std::size_t n) {
  __m256d mm[16];
  for (int k = 0; k < 16; ++k) mm[k] = _mm256_set1_pd(m[static_cast<std::size_t>(k)]);
  double* c[4] = {c0, c1, c2, c3};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x[4] = {_mm256_loadu_pd(c0 + i), _mm256_loadu_pd(c1 + i), _mm256_loadu_pd(c2 + i),
                          _mm256_loadu_pd(c3 + i)};
    __m256d y[4];
    for (int r = 0; r < 4; ++r) {
      __m256d acc = _mm256_mul_pd(mm[4 * r], x[0]);
      acc = _mm256_fmadd_pd(mm[4 * r + 1], x[1], acc);
      acc = _mm256_fmadd_pd(mm[4 * r + 2], x[2], acc);
      y[r] = _mm256_fmadd_pd(mm[4 * r + 3], x[3], acc);
    }
    for (int r = 0; r < 4; ++r) _mm256_storeu_pd(c[r] + i, y[r]);
  }
  for (; i < n; ++i) {
    const double x0 = c0[i], x1 = c1[i], x2 = c2[i], x3 = c3[i];
    c0[i] = m[0] * x0 + m[1] * x1 + m[2] * x2 + m[3] * x3;
    c1[i] = m[4] * x0 + m[5] * x1 + m[6] * x2 + m[7] * x3;
    c2[i] = m[8] * x0 + m[9] * x1 + m[10] * x2 + m[11] * x3;
    c3[i] = m[12] * x0 + m[13] * x1 + m[14] * x2 + m[15] * x3;
  }
}

}  // namespace avx2

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{Isa::Avx2, avx2::sin2_half, avx2::multiply, avx2::dot, avx2::mat2_apply,
                                 avx2::mat4_apply};
  return table;
}

}  // namespace pulsedtls::simd
