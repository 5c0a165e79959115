// Fixes the Gaussian width convention T = c·σ.
//
// For a π pulse the short-pulse two-photon probability is P2 ≈ k·γT with
// k ∝ 1/c (the integrand scales with σ = T/c). Evaluating k at the stored c
// therefore gives the calibrated constant directly: c_cal = c · k(c) / 0.2188.

#include <doctest.h>

#include <numbers>

#include "pulsedtls/analytic.hpp"

using namespace pulsedtls;

TEST_CASE("gaussian width constant reproduces the published two-photon coefficient") {
  const double gt = 1e-5;
  const auto p = PulseShape::gaussian(std::numbers::pi, gt);
  const auto d = analytic::exclusive_Pn(p, SystemParams{1.0}, 2);
  const double k = d.P(2) / gt;
  CHECK(k == doctest::Approx(0.2188).epsilon(0.01));
  const double c_cal = kGaussianWidthRatio * k / 0.2188;
  MESSAGE("coefficient " << k << ", calibrated c = " << c_cal << ", stored c = " << kGaussianWidthRatio);
  // 2√ln2, the intensity full width at half maximum, is within 1e-4 of the calibration.
  CHECK(c_cal == doctest::Approx(kGaussianWidthRatio).epsilon(1e-4));
  CHECK(kGaussianWidthRatio == doctest::Approx(2.0 * std::sqrt(std::log(2.0))).epsilon(1e-15));
}
