#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pulsedtls/numerics/quadrature.hpp"

using namespace pulsedtls::numerics;

TEST_CASE("polynomials up to degree 10 integrate exactly") {
  for (int k = 0; k <= 10; ++k) {
    const auto r = integrate_1d([k](double x) { return std::pow(x, k); }, -0.5, 1.5);
    const double exact = (std::pow(1.5, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
    CHECK(r.converged);
    CHECK(std::abs(r.value - exact) <= 1e-14 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("smooth and kinked integrands") {
  const auto s = integrate_1d([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.error < 1e-8);
  const double kink[] = {0.3};
  const auto k = integrate_1d([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, kink);
  CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
  const auto e = integrate_1d([](double x) { return std::exp(-x) / std::sqrt(x + 1e-3); }, 0.0, 5.0,
                              {1e-10, 1e-14});
  CHECK(e.converged);
}

TEST_CASE("degenerate and invalid ranges") {
  CHECK(integrate_1d([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
  CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, {0.0, 1e-12}), std::invalid_argument);
}

TEST_CASE("subdivision limit is reported, not hidden") {
  QuadratureConfig cfg{1e-14, 1e-16, 2};
  const auto r = integrate_1d([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(require_converged(r, "test"), QuadratureError);
}

TEST_CASE("batched and pointwise integrands agree") {
  auto pointwise = [](double x) { return std::cos(3.0 * x) * x; };
  auto batched = [](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::cos(3.0 * x[i]) * x[i];
  };
  const auto a = integrate_1d(pointwise, 0.0, 2.0);
  const auto b = integrate_1d(batched, 0.0, 2.0);
  CHECK(a.value == b.value);
}

TEST_CASE("simplex volumes and monomials") {
  for (int d = 1; d <= 3; ++d) {
    const auto r = integrate_simplex([](std::span<const double>) { return 1.0; }, d, 2.0);
    CHECK(r.value == doctest::Approx(std::pow(2.0, d) / std::tgamma(d + 1.0)).epsilon(1e-13));
  }
  // ∫ t1 t2 over 0 <= t1 <= t2 <= 1 is 1/8.
  const auto r2 = integrate_simplex([](std::span<const double> t) { return t[0] * t[1]; }, 2, 1.0);
  CHECK(r2.value == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
  // ∫∫∫ t1·t3 dt1 dt2 dt3 = ∫ t3 · t3³/6 dt3 = 1/30.
  const auto r3 = integrate_simplex([](std::span<const double> t) { return t[0] * t[2]; }, 3, 1.0);
  CHECK(r3.value == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_simplex([](std::span<const double>) { return 1.0; }, 4, 1.0), std::invalid_argument);
}

TEST_CASE("simplex integral of a symmetric function is 1/n! of the cube") {
  auto f = [](std::span<const double> t) {
    double p = 1.0;
    for (double x : t) p *= std::exp(-x) * (1.0 + x);
    return p;
  };
  // ∫_0^1 e^{-x}(1+x) dx = 2 - 3/e
  const double one = 2.0 - 3.0 / std::numbers::e;
  const auto r = integrate_simplex(f, 3, 1.0);
  CHECK(r.value == doctest::Approx(one * one * one / 6.0).epsilon(1e-11));
}
