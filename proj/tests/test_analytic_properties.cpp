#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pulsedtls/analytic.hpp"
#include "pulsedtls/oracle.hpp"

using namespace pulsedtls;
using namespace pulsedtls::analytic;
using std::numbers::pi;

namespace {
const SystemParams kSys{1.0};
}

TEST_CASE("inclusive probabilities are nested") {
  for (double gt : {1e-3, 1e-2, 1e-1, 1.0}) {
    for (const auto& p : {PulseShape::square(pi, gt), PulseShape::square(2 * pi, gt), PulseShape::gaussian(pi, gt),
                          PulseShape::gaussian(3 * pi, gt)}) {
      CAPTURE(gt);
      double prev = 1.0, err = 0.0;
      for (int n = 1; n <= 4; ++n) {
        const auto f = inclusive_Fn(p, kSys, n);
        err = std::max(err, f.error);
        const double eps = 10.0 * err + 1e-12;
        CHECK(f.value <= prev + eps);
        CHECK(f.value >= -eps);
        prev = f.value;
      }
    }
  }
}

TEST_CASE("quadrature matches the square closed forms") {
  for (double area : {pi / 2, pi, 2 * pi, 3 * pi, 4 * pi}) {
    for (double gt : {1e-3, 1e-2, 1e-1, 1.0}) {
      CAPTURE(area);
      CAPTURE(gt);
      const auto p = PulseShape::square(area, gt);
      const auto c = closed_form_square(area, gt);
      CHECK(std::abs(inclusive_Fn(p, kSys, 1).value - c.F1) < 1e-6);
      CHECK(std::abs(inclusive_Fn(p, kSys, 2).value - c.F2) < 1e-6);
      CHECK(std::abs(inclusive_Fn(p, kSys, 3).value - c.F3) < 1e-6);
    }
  }
}

TEST_CASE("marginals repeat with period 2 pi in the total area") {
  const double gt = 1e-4;
  for (double area : {pi, 1.5 * pi}) {
    const auto p = PulseShape::square(area, gt);
    const auto q = PulseShape::square(area + 2 * pi, gt);
    for (double frac : {0.13, 0.31, 0.62, 0.87}) {
      const double a = frac * area;
      const double tp = a / area * gt;
      const double tq = a / (area + 2 * pi) * gt;
      CAPTURE(area);
      CAPTURE(frac);
      const double m1p = marginal_p1(p, kSys, tp).value;
      const double m1q = marginal_p1(q, kSys, tq).value;
      CHECK(std::abs(m1p / m1q - 1) < 1e-3);
      const double m2p = marginal_p2(p, kSys, tp).value;
      const double m2q = marginal_p2(q, kSys, tq).value;
      CHECK(std::abs(m2p / m2q - 1) < 1e-3);
    }
  }
}

TEST_CASE("even-pi pulses favour two photons") {
  for (double area : {2 * pi, 4 * pi}) {
    const auto d = exclusive_Pn(PulseShape::square(area, 1e-3), kSys, 2);
    CHECK(d.P(2) > d.P(1));
  }
}

TEST_CASE("emission flux equals gamma times the excited population") {
  const double gt = 1e-2;
  for (const auto& p : {PulseShape::square(pi, gt), PulseShape::gaussian(pi, gt)}) {
    for (double frac : {0.2, 0.5, 0.8, 1.5, 5.0}) {
      const double t = frac * p.window_end();
      const double flux = emission_flux(p, kSys, t).value;
      const double ref = kSys.gamma * oracle::master_equation_rho(p, kSys, t).ee;
      CAPTURE(t);
      CHECK(std::abs(flux / ref - 1) < 0.05);
    }
  }
}

TEST_CASE("Gaussian two-photon coefficient") {
  for (double gt : {1e-3, 1e-4}) {
    const auto d = exclusive_Pn(PulseShape::gaussian(pi, gt), kSys, 2);
    CHECK(d.P(2) / gt == doctest::Approx(0.2188).epsilon(0.01));
  }
}
