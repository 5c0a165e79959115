#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pulsedtls/analytic.hpp"
#include "pulsedtls/oracle.hpp"

using namespace pulsedtls;
using namespace pulsedtls::oracle;
using std::numbers::pi;

namespace {
const SystemParams kSys{1.0};
}

TEST_CASE("undamped Rabi rotation") {
  const auto pi_pulse = PulseShape::square(pi, 1.0);
  const auto s = propagate_conditional(pi_pulse, SystemParams{0.0}, TwoLevelState::ground(), 0.0, 1.0);
  CHECK(std::abs(s.amp_g) < 1e-8);
  CHECK(std::abs(std::abs(s.amp_e) - 1.0) < 1e-8);
  const auto r = propagate_conditional(PulseShape::square(2 * pi, 1.0), SystemParams{0.0}, TwoLevelState::ground(),
                                       0.0, 1.0);
  CHECK(std::norm(r.amp_e) < 1e-8);
  CHECK(master_equation_rho(pi_pulse, SystemParams{0.0}, 1.5).ee == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("free decay") {
  const auto none = PulseShape::square(0.0, 1.0);
  const auto s = propagate_conditional(none, kSys, TwoLevelState::excited(), 0.0, 0.8);
  CHECK(std::abs(s.amp_e) == doctest::Approx(std::exp(-0.4)).epsilon(1e-10));
  CHECK(s.norm2() == doctest::Approx(std::exp(-0.8)).epsilon(1e-10));
  DensityMatrix2 e;
  e.gg = 0.0;
  e.ee = 1.0;
  CHECK(master_equation_rho(none, kSys, 1.3, e).ee == doctest::Approx(std::exp(-1.3)).epsilon(1e-10));
}

TEST_CASE("tabulated propagator matches direct integration") {
  for (const auto& p : {PulseShape::square(pi, 0.5), PulseShape::gaussian(2 * pi, 3.0)}) {
    const ConditionalPropagator u(p, kSys);
    for (auto [a, b] : {std::pair{0.0, 0.3}, {0.1, 0.45}, {0.2, 2.7}, {0.0, p.window_end() + 4.0}}) {
      const auto x = u.apply(TwoLevelState::ground(), a, b);
      const auto y = propagate_conditional(p, kSys, TwoLevelState::ground(), a, b);
      CHECK(std::abs(x.amp_g - y.amp_g) < 1e-9);
      CHECK(std::abs(x.amp_e - y.amp_e) < 1e-9);
    }
  }
}

TEST_CASE("survival of a pi pulse against the Poisson-process rate") {
  // λ = ∫γ sin²(A(t)/2) dt = γT/2 for a square π pulse.
  for (double gt : {1e-3, 0.1}) {
    const auto p = PulseShape::square(pi, gt);
    const double survival = propagate_conditional(p, kSys, TwoLevelState::ground(), 0.0, gt).norm2();
    const double rel = std::abs(survival / std::exp(-gt / 2) - 1);
    MESSAGE("gammaT = " << gt << ": relative deviation from exp(-lambda) = " << rel);
    if (gt < 1e-2) CHECK(rel < 1e-4);
  }
}

TEST_CASE("exact emission densities") {
  const double gt = 1e-3;
  const auto p = PulseShape::square(pi, gt);
  const double t1[] = {gt + 2.0};
  CHECK(exact_density_fn(p, kSys, t1) == doctest::Approx(std::exp(-2.0)).epsilon(2 * gt));
  const double late[] = {gt + 0.5, gt + 1.0};
  CHECK(std::abs(exact_density_fn(p, kSys, late)) < 1e-12);
  double prev = 1.0;
  for (double g : {1e-1, 1e-2, 1e-3}) {
    const auto q = PulseShape::square(pi, g);
    const double mid[] = {0.5 * g};
    const double dev = std::abs(exact_density_fn(q, kSys, mid) / analytic::density_fn(q, kSys, mid) - 1);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("exact distribution") {
  const auto d = exact_distribution(PulseShape::square(pi, 1e-4), kSys, 2);
  CHECK(d.P(1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(d.provenance == Provenance::ExactOracle);

  // The leading-order hierarchy overestimates P2 and underestimates P1 at γT = 0.3,
  // and the gap widens with γT.
  double prev = 0.0;
  for (double gt : {0.1, 0.3, 1.0}) {
    const auto e = exact_distribution(PulseShape::square(pi, gt), kSys, 2);
    const auto c = analytic::closed_form_square(pi, gt);
    const double gap = std::abs(c.P2 - e.P(2));
    CHECK(gap > prev);
    prev = gap;
  }
}

TEST_CASE("exact distribution at 2 pi, gamma*T = 1") {
  // Frozen oracle values: three independent routes (nested quadrature over the
  // tabulated propagator, number-resolved master equation, moments) agree.
  const auto p = PulseShape::square(2 * pi, 1.0);
  const auto q = exact_distribution(p, kSys, 3);
  const auto r = resolved_distribution(p, kSys, 3);
  for (int n = 0; n <= 3; ++n) CHECK(std::abs(q.P(n) - r.P(n)) < 1e-7);
  CHECK(q.P(0) == doctest::Approx(0.60551).epsilon(1e-4));
  CHECK(q.P(1) == doctest::Approx(0.07832).epsilon(1e-3));
  CHECK(q.P(2) == doctest::Approx(0.28293).epsilon(1e-4));
  CHECK(q.P(3) == doctest::Approx(0.03235).epsilon(1e-3));
  const auto m = exact_moments(p, kSys);
  CHECK(m.mean == doctest::Approx(0.74481).epsilon(1e-4));
  double mean = 0.0;
  for (int n = 1; n <= 3; ++n) mean += n * r.P(n);
  // Σ_{n≥4} n P_n = 4 F4 + F5 + F6 + ..., and F5 + F6 + ... is far below F4 here.
  const double gap = m.mean - mean;
  CHECK(gap >= 4.0 * r.truncation_bound - 1e-7);
  CHECK(gap <= 5.0 * r.truncation_bound);
}

TEST_CASE("trajectories without decay never emit") {
  const auto recs = sample_trajectories(PulseShape::square(pi, 1.0), SystemParams{0.0}, 100,
                                        numerics::RandomStream(3), 5.0);
  for (const auto& r : recs) CHECK(r.count == 0);
}

TEST_CASE("free decay lifetime from trajectories") {
  const std::size_t n = 100000;
  const auto recs = sample_trajectories(PulseShape::square(0.0, 1e-3), kSys, n, numerics::RandomStream(11), 40.0,
                                        TwoLevelState::excited());
  double s = 0.0, s2 = 0.0;
  for (const auto& r : recs) {
    REQUIRE(r.count == 1);
    s += r.emission_times[0];
    s2 += r.emission_times[0] * r.emission_times[0];
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("2 pi trajectories give P2/P1 near 3") {
  const auto p = PulseShape::square(2 * pi, 1e-2);
  const std::size_t n = 100000;
  const auto recs = sample_trajectories(p, kSys, n, numerics::RandomStream(2), default_horizon(p, kSys));
  const auto h = histogram_distribution(recs, 3);
  const double ratio = h.P(2) / h.P(1);
  const double se = ratio * std::sqrt(1.0 / (h.P(1) * n) + 1.0 / (h.P(2) * n));
  const auto e = exact_distribution(p, kSys, 2);
  MESSAGE("MC P2/P1 = " << ratio << " +- " << se << ", exact " << e.P(2) / e.P(1));
  CHECK(std::abs(ratio - e.P(2) / e.P(1)) < 3.0 * se);
  CHECK(std::abs(ratio - 3.0) < 3.0 * se + 0.05);
}

TEST_CASE("trajectory ensemble reproduces the master equation") {
  const double gt = 0.1;
  const auto p = PulseShape::square(pi, gt);
  const std::size_t n = 100000;
  for (double t : {0.5 * gt, gt}) {
    const auto recs = sample_trajectories(p, kSys, n, numerics::RandomStream(17), t);
    double s = 0.0, s2 = 0.0;
    for (const auto& r : recs) {
      const double e = std::norm(r.final_state.amp_e);
      s += e;
      s2 += e * e;
    }
    const double mean = s / n;
    const double se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
    const double ref = master_equation_rho(p, kSys, t).ee;
    CAPTURE(t);
    CHECK(std::abs(mean - ref) < 4.0 * se + 1e-9);
  }
}

TEST_CASE("equal-time correlation vanishes") {
  const auto p = PulseShape::square(pi, 0.5);
  const auto grid = correlation_grid(p, kSys, 11, 10, 5.0);
  const auto c = g2_two_time(p, kSys, grid, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(c.at(i, i)) < 1e-12);
}

TEST_CASE("short pulse correlations live in two slivers") {
  const double gt = 1e-2;
  const auto p = PulseShape::square(pi, gt);
  const auto grid = correlation_grid(p, kSys, 41, 200, gt + 10.0);
  const auto c = g2_two_time(p, kSys, grid, grid);
  const auto w = pulsewise_g2(c);
  // Portion of the pair integral with exactly one time inside the pulse.
  std::vector<double> wt(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    wt[i] += 0.5 * (grid[i + 1] - grid[i]);
    wt[i + 1] += 0.5 * (grid[i + 1] - grid[i]);
  }
  double sliver = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j)
      if ((grid[i] < gt) != (grid[j] < gt)) sliver += wt[i] * wt[j] * c.at(i, j);
  CHECK(sliver / w.pair_integral > 0.95);
}

TEST_CASE("pulse-wise coherence matches the exact moments") {
  const double gt = 0.5;
  const auto p = PulseShape::square(pi, gt);
  const auto grid = correlation_grid(p, kSys, 101, 400, gt + 25.0);
  const auto w = pulsewise_g2(g2_two_time(p, kSys, grid, grid));
  const auto m = exact_moments(p, kSys);
  CHECK(w.mean == doctest::Approx(m.mean).epsilon(1e-3));
  CHECK(w.pair_integral == doctest::Approx(m.factorial2).epsilon(2e-2));
}

TEST_CASE("invalid arguments") {
  const auto p = PulseShape::square(pi, 1.0);
  CHECK_THROWS_AS(sample_trajectories(p, kSys, 0, numerics::RandomStream(1), 3.0), std::invalid_argument);
  CHECK_THROWS_AS(resolved_distribution(p, kSys, 4), std::invalid_argument);
  const double bad[] = {0.5, 0.2};
  CHECK_THROWS_AS(g2_two_time(p, kSys, bad, bad), std::invalid_argument);
  CHECK_THROWS_AS(correlation_grid(p, kSys, 1, 0, 2.0), std::invalid_argument);
}
