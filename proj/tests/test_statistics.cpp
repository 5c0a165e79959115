#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pulsedtls/analytic.hpp"
#include "pulsedtls/oracle.hpp"
#include "pulsedtls/statistics.hpp"

using namespace pulsedtls;
using namespace pulsedtls::stats;
using std::numbers::pi;

namespace {

const SystemParams kSys{1.0};

PhotocountDistribution dist(std::vector<double> p) {
  PhotocountDistribution d;
  d.exclusive = std::move(p);
  double tail = 0.0;
  d.inclusive.assign(d.exclusive.size() - 1, 0.0);
  for (std::size_t k = d.exclusive.size() - 1; k >= 1; --k) {
    tail += d.exclusive[k];
    d.inclusive[k - 1] = tail;
  }
  return d;
}

PhotocountDistribution poisson(double mean, int kmax) {
  std::vector<double> p;
  for (int k = 0; k <= kmax; ++k) p.push_back(std::exp(-mean) * std::pow(mean, k) / std::tgamma(k + 1.0));
  return dist(p);
}

}  // namespace

TEST_CASE("expected photon number") {
  CHECK(expected_n(dist({1.0})) == 0.0);
  CHECK(expected_n(dist({0.0, 1.0})) == 1.0);
  const auto c = analytic::exclusive_Pn(PulseShape::square(pi, 0.1), kSys, 2);
  CHECK(expected_n(c) == doctest::Approx(1.01064).epsilon(1e-5));
}

TEST_CASE("second-order coherence") {
  CHECK(g2_zero(dist({0.0, 1.0})) == 0.0);
  CHECK(g2_zero(dist({0.0, 0.0, 1.0})) == doctest::Approx(0.5));
  // Truncated Poisson(1) at k = 6, evaluated directly.
  CHECK(g2_zero(poisson(1.0, 6)) == doctest::Approx(1.0).epsilon(3e-3));
  CHECK_THROWS_AS(g2_zero(dist({1.0, 0.0})), std::domain_error);
  for (double p1 : {0.0, 0.3, 0.99}) {
    if (p1 > 0.0) CHECK(g2_zero(dist({1.0 - p1, p1})) == 0.0);
  }
}

TEST_CASE("short-pulse coherence approximation") {
  CHECK(g2_zero_short_pulse(1.0, 0.0) == 0.0);
  const auto c = analytic::closed_form_square(pi, 0.01);
  CHECK(g2_zero_short_pulse(c.P1, c.P2) == doctest::Approx(0.00249).epsilon(5e-3));
}

TEST_CASE("relative variance") {
  CHECK(variance_rel(dist({0.0, 1.0})) == 0.0);
  CHECK(variance_rel(poisson(1.0, 8)) == doctest::Approx(1.0).epsilon(1e-3));
  const auto e = oracle::exact_distribution(PulseShape::square(2 * pi, 0.3), kSys, 3);
  CHECK(variance_rel(e) > 1.0);
  const auto m = oracle::exact_moments(PulseShape::square(2 * pi, 0.3), kSys);
  CHECK(variance_rel_from_moments(m.mean, m.factorial2) > 1.0);
}

TEST_CASE("purities") {
  const auto a = purities(dist({0.5, 0.5}));
  CHECK(a[0] == 1.0);
  const auto b = purities(dist({0.8, 0.1, 0.1}));
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(purities(dist({1.0, 0.0})), std::domain_error);
}

TEST_CASE("moment forms agree with the distribution forms") {
  const auto d = dist({0.2, 0.3, 0.4, 0.1});
  const double m = expected_n(d);
  const double f2 = 2 * 0.4 + 6 * 0.1;
  CHECK(g2_from_moments(m, f2) == doctest::Approx(g2_zero(d)));
  CHECK(variance_rel_from_moments(m, f2) == doctest::Approx(variance_rel(d)));
}

TEST_CASE("truncation sensitivity is flagged") {
  auto d = dist({0.5, 0.3, 0.2});
  d.truncation_bound = 0.05;
  CHECK(summarize(d).truncation_sensitive);
  d.truncation_bound = 1e-9;
  CHECK_FALSE(summarize(d).truncation_sensitive);
}

TEST_CASE("short-pulse coherence is first-order accurate") {
  for (auto [gt, tol] : {std::pair{0.1, 0.1}, {0.01, 0.01}}) {
    const auto e = oracle::exact_distribution(PulseShape::square(pi, gt), kSys, 3);
    const double full = g2_zero(e);
    const double approx = g2_zero_short_pulse(e.P(1), e.P(2));
    CAPTURE(gt);
    CHECK(std::abs(approx / full - 1) <= tol);
  }
}

TEST_CASE("pi-pulse coherence grows with the pulse width") {
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double gt = std::pow(10.0, -3.0 + 4.0 * i / 20.0);
    const auto m = oracle::exact_moments(PulseShape::square(pi, gt), kSys);
    const double g = g2_from_moments(m.mean, m.factorial2);
    CAPTURE(gt);
    CHECK(g > prev);
    prev = g;
  }
}
