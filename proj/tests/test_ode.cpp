#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pulsedtls/numerics/ode.hpp"

using namespace pulsedtls::numerics;

namespace {

// exp(tA) for a real 2x2 matrix, via the Cayley-Hamilton closed form.
std::array<double, 4> expm2(const std::array<double, 4>& a, double t) {
  const double tr = 0.5 * (a[0] + a[3]);
  const double det = (a[0] - tr) * (a[3] - tr) - a[1] * a[2];
  const double q = -det;  // (A - tr I)^2 = q I
  double c, s;
  if (q > 0) {
    const double r = std::sqrt(q);
    c = std::cosh(r * t);
    s = std::sinh(r * t) / r;
  } else if (q < 0) {
    const double r = std::sqrt(-q);
    c = std::cos(r * t);
    s = std::sin(r * t) / r;
  } else {
    c = 1.0;
    s = t;
  }
  const double e = std::exp(tr * t);
  return {e * (c + s * (a[0] - tr)), e * s * a[1], e * s * a[2], e * (c + s * (a[3] - tr))};
}

}  // namespace

TEST_CASE("exponential decay") {
  const std::array<double, 3> t{0.0, 1.0, 4.0};
  const auto ys = integrate_ode<1>([](double, const State<1>& y, State<1>& d) { d[0] = -2.0 * y[0]; }, State<1>{1.0}, t);
  REQUIRE(ys.size() == 3);
  CHECK(ys[0][0] == 1.0);
  CHECK(ys[1][0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(ys[2][0] == doctest::Approx(std::exp(-8.0)).epsilon(1e-8));
}

TEST_CASE("random 2x2 linear systems match the matrix exponential") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::array<double, 4> a{u(rng), u(rng), u(rng), u(rng)};
    const State<2> y0{u(rng), u(rng)};
    auto rhs = [&](double, const State<2>& y, State<2>& d) {
      d[0] = a[0] * y[0] + a[1] * y[1];
      d[1] = a[2] * y[0] + a[3] * y[1];
    };
    const std::array<double, 2> t{0.0, 1.7};
    OdeConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    const auto y = integrate_ode<2>(rhs, y0, t, cfg).back();
    const auto m = expm2(a, 1.7);
    const double e0 = m[0] * y0[0] + m[1] * y0[1];
    const double e1 = m[2] * y0[0] + m[3] * y0[1];
    const double scale = 1.0 + std::abs(e0) + std::abs(e1);
    CHECK(std::abs(y[0] - e0) < 1e-9 * scale);
    CHECK(std::abs(y[1] - e1) < 1e-9 * scale);
  }
}

TEST_CASE("fixed-step RK4 is fourth order") {
  auto rhs = [](double t, const State<1>& y, State<1>& d) { d[0] = std::cos(t) * y[0]; };
  const std::array<double, 2> t{0.0, 2.0};
  auto err = [&](double h) {
    OdeConfig cfg;
    cfg.method = OdeMethod::ClassicalRk4;
    cfg.max_step = h;
    return std::abs(integrate_ode<1>(rhs, State<1>{1.0}, t, cfg).back()[0] - std::exp(std::sin(2.0)));
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("breakpoints keep a discontinuous right-hand side accurate") {
  auto rhs = [](double t, const State<1>&, State<1>& d) { d[0] = t < 0.37 ? 1.0 : -3.0; };
  const std::array<double, 2> t{0.0, 1.0};
  const double bp[] = {0.37};
  const auto y = integrate_ode<1>(rhs, State<1>{0.0}, t, {}, bp).back();
  CHECK(y[0] == doctest::Approx(0.37 - 3.0 * 0.63).epsilon(1e-10));
}

TEST_CASE("tiny trailing intervals do not underflow the step size") {
  auto rhs = [](double, const State<1>& y, State<1>& d) { d[0] = -y[0]; };
  const std::array<double, 3> t{0.0, 1.0, 1.0 + 1e-13};
  const auto ys = integrate_ode<1>(rhs, State<1>{1.0}, t);
  CHECK(ys.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("invalid inputs") {
  auto rhs = [](double, const State<1>&, State<1>& d) { d[0] = 0.0; };
  const std::array<double, 2> back{1.0, 0.0};
  CHECK_THROWS_AS(integrate_ode<1>(rhs, State<1>{0.0}, back), std::invalid_argument);
  OdeConfig bad;
  bad.rel_tol = 0.0;
  const std::array<double, 2> t{0.0, 1.0};
  CHECK_THROWS_AS(integrate_ode<1>(rhs, State<1>{0.0}, t, bad), std::invalid_argument);
  OdeConfig rk;
  rk.method = OdeMethod::ClassicalRk4;
  CHECK_THROWS_AS(integrate_ode<1>(rhs, State<1>{0.0}, t, rk), std::invalid_argument);
}
