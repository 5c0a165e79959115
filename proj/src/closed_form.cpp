#include <array>
#include <cmath>
#include <stdexcept>

#include "pulsedtls/analytic.hpp"

namespace pulsedtls::analytic {

namespace {

// Below this area the direct expressions lose digits to cancellation.
constexpr double kSeriesArea = 0.5;

// Power series in A² with coefficients c[k] for A^(2k + lowest).
template <std::size_t N>
double series(const std::array<double, N>& c, double a, int lowest) {
  const double a2 = a * a;
  double acc = 0.0;
  for (std::size_t k = N; k-- > 0;) acc = acc * a2 + c[k];
  return acc * std::pow(a, lowest);
}

// 1 − sin(A)/A
double bracket1(double a) {
  static constexpr std::array<double, 7> c = {1.0 / 6,           -1.0 / 120,           1.0 / 5040,
                                              -1.0 / 362880,     1.0 / 39916800,       -1.0 / 6227020800.0,
                                              1.0 / 1307674368000.0};
  return a < kSeriesArea ? series(c, a, 2) : 1.0 - std::sin(a) / a;
}

// 2 + cos(A) − 3 sin(A)/A
double bracket2(double a) {
  static constexpr std::array<double, 7> c = {1.0 / 60,          -1.0 / 1260,           1.0 / 60480,
                                              -1.0 / 4989600,    1.0 / 622702080.0,     -1.0 / 108972864000.0,
                                              1.0 / 25406244864000.0};
  return a < kSeriesArea ? series(c, a, 4) : 2.0 + std::cos(a) - 3.0 * std::sin(a) / a;
}

// (4(A² − 6) − (A² − 24) cos(A) + 9A sin(A)) / A²
double bracket3(double a) {
  static constexpr std::array<double, 7> c = {1.0 / 5040,           -1.0 / 151200,        1.0 / 9979200,
                                              -1.0 / 1089728640.0,  1.0 / 174356582400.0, -1.0 / 38109367296000.0,
                                              1.0 / 10861169679360000.0};
  if (a < kSeriesArea) return series(c, a, 6);
  const double a2 = a * a;
  return (4.0 * (a2 - 6.0) - (a2 - 24.0) * std::cos(a) + 9.0 * a * std::sin(a)) / a2;
}

}  // namespace

SquareClosedForm closed_form_square(double total_area, double gammaT) {
  if (!std::isfinite(total_area) || !(total_area > 0.0))
    throw std::invalid_argument("closed_form_square requires total_area > 0");
  if (!std::isfinite(gammaT) || gammaT < 0.0) throw std::invalid_argument("gammaT must be finite and >= 0");
  const double a = total_area;
  const double e = std::exp(-0.5 * gammaT);
  const double s = std::sin(0.5 * a);
  SquareClosedForm out{};
  out.F1 = e * (0.5 * gammaT * bracket1(a) + s * s);
  out.F2 = e * gammaT / 8.0 * bracket2(a);
  out.F3 = e * gammaT * gammaT / 64.0 * bracket3(a);
  out.P1 = out.F1 - out.F2;
  out.P2 = out.F2 - out.F3;
  return out;
}

}  // namespace pulsedtls::analytic
