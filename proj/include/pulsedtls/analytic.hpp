#pragma once

// Short-pulse counting hierarchy: emission densities f_n, inclusive and
// exclusive probabilities, marginal densities and square-pulse closed forms.
//
// Times are in units of 1/gamma when gamma = 1; every formula carries gamma
// explicitly so other units work too. W below is the pulse support end and
// T its nominal width (equal for square pulses).

#include <span>

#include "pulsedtls/distribution.hpp"
#include "pulsedtls/numerics/quadrature.hpp"
#include "pulsedtls/pulse.hpp"

namespace pulsedtls::analytic {

using numerics::Estimate;
using numerics::QuadratureConfig;

/// sin²(a/2): excited population after an ideal rotation of area a.
double ideal_excited_prob(double a);

/// Effective elapsed time in the no-emission factor exp(-γτ/2) at t < W.
/// τ(t) = T·A(t)/A(∞), which is exactly t for a square pulse.
double no_emission_time(const PulseShape& p, double t);

/// Inclusive density f_n(t_1, ..., t_n). Times must be strictly increasing and >= 0.
double density_fn(const PulseShape& p, const SystemParams& sys, std::span<const double> times);

/// Inclusive probability F_n for 1 <= n <= 4. Throws QuadratureError when the
/// nested quadrature does not converge.
Estimate inclusive_Fn(const PulseShape& p, const SystemParams& sys, int n, const QuadratureConfig& cfg = {});

/// P_0..P_nmax with truncation bound F_{nmax+1}, 1 <= nmax <= 3.
PhotocountDistribution exclusive_Pn(const PulseShape& p, const SystemParams& sys, int nmax,
                                    const QuadratureConfig& cfg = {});

struct SquareClosedForm {
  double F1, F2, F3, P1, P2;
};

/// Square-pulse closed forms as functions of total area and γT. Small areas
/// switch to a power series where the direct expressions cancel.
SquareClosedForm closed_form_square(double total_area, double gammaT);

/// Exclusive single-emission density p_1(t_1) = f_1 − ∫f_2 dt_2.
Estimate marginal_p1(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg = {});
/// γ sin²(A(t_1)/2) cos²((A(∞) − A(t_1))/2).
double marginal_p1_short_pulse(const PulseShape& p, const SystemParams& sys, double t1);

/// Density of the first emission of an exactly-two-photon sequence.
Estimate marginal_p2(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg = {});
/// γ e^{−γT/2} sin²((A(∞) − A(t_1))/2) sin²(A(t_1)/2), the leading-order value of marginal_p2.
double marginal_p2_short_pulse(const PulseShape& p, const SystemParams& sys, double t1);

/// Exclusive two-emission joint density p_2(t_1, t_2), t_1 < t_2.
Estimate density_p2_joint(const PulseShape& p, const SystemParams& sys, double t1, double t2,
                          const QuadratureConfig& cfg = {});

/// Ordered three-emission density in the short-pulse limit, t_1 < t_2 < t_3.
double density_p3(const PulseShape& p, const SystemParams& sys, double t1, double t2, double t3);
/// Symmetrized density: density_p3 of the sorted times divided by 3!.
double density_p3_sym(const PulseShape& p, const SystemParams& sys, double t1, double t2, double t3);
/// Symmetrized density with one time integrated out.
Estimate density_p3_sym_pair(const PulseShape& p, const SystemParams& sys, double t1, double t2,
                             const QuadratureConfig& cfg = {});
/// Symmetrized density with two times integrated out.
Estimate density_p3_sym_single(const PulseShape& p, const SystemParams& sys, double t1,
                               const QuadratureConfig& cfg = {});
/// Density of the first emission of a three-photon sequence.
Estimate marginal_p3(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg = {});

/// Σ_n n·p_{n,S}(t) over n <= 3: expected emission rate at t.
Estimate emission_flux(const PulseShape& p, const SystemParams& sys, double t, const QuadratureConfig& cfg = {});

/// (γT/2)^{n−1}/(n−1)! · e^{−γT/2}.
double poisson_limit_Fn(double gammaT, int n);

}  // namespace pulsedtls::analytic
