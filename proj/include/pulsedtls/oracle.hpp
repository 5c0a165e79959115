#pragma once

// Exact two-level dynamics: conditional (no-jump) propagation, emission
// densities and photocount distributions without the short-pulse
// approximation, jump-trajectory sampling, the master equation and two-time
// correlations by quantum regression.
//
// The drive is real (phase 0), so the no-jump propagator is a real 2x2
// matrix acting on (amp_g, amp_e).

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pulsedtls/distribution.hpp"
#include "pulsedtls/numerics/ode.hpp"
#include "pulsedtls/numerics/quadrature.hpp"
#include "pulsedtls/numerics/random.hpp"
#include "pulsedtls/pulse.hpp"
#include "pulsedtls/simd/kernels.hpp"

namespace pulsedtls::oracle {

using numerics::Estimate;
using numerics::OdeConfig;
using numerics::QuadratureConfig;
using simd::Mat2;

/// Possibly unnormalized state vector amp_g|g> + amp_e|e>.
struct TwoLevelState {
  std::complex<double> amp_g{1.0, 0.0};
  std::complex<double> amp_e{0.0, 0.0};

  static TwoLevelState ground() { return {}; }
  static TwoLevelState excited() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  double norm2() const { return std::norm(amp_g) + std::norm(amp_e); }
};

/// Tight ODE tolerances used by the oracle unless the caller overrides them.
OdeConfig oracle_ode_config();

/// Integrates the no-jump evolution of `state` from t_a to t_b directly with
/// the ODE solver. gamma = 0 is allowed. The squared norm of the result is the
/// no-emission probability over [t_a, t_b] given `state` at t_a.
TwoLevelState propagate_conditional(const PulseShape& p, const SystemParams& sys, const TwoLevelState& state,
                                    double t_a, double t_b, const OdeConfig& cfg = oracle_ode_config());

/// Tabulated no-jump propagator U(t, s).
///
/// U(t, 0) is stored on a node grid fine enough that one RK4 step from the
/// nearest node reproduces it to about 1e-10. Nodes are grouped in blocks of
/// length <= 2/gamma so U(t, s) = U(t, a) U(s, a)^{-1} never inverts a badly
/// conditioned matrix. Beyond the pulse support the propagator is diagonal
/// and evaluated in closed form. Immutable after construction.
class ConditionalPropagator {
 public:
  ConditionalPropagator(const PulseShape& p, const SystemParams& sys, const OdeConfig& cfg = oracle_ode_config());

  /// U(t, s) for 0 <= s <= t.
  Mat2 between(double t, double s) const;
  TwoLevelState apply(const TwoLevelState& state, double t_a, double t_b) const;

  const PulseShape& pulse() const { return pulse_; }
  double gamma() const { return gamma_; }
  std::size_t node_count() const;

 private:
  struct Block {
    std::vector<double> t;
    std::vector<Mat2> u;  // U(t[i], t[0])
  };
  std::size_t block_of(double t) const;
  Mat2 within(const Block& b, double t) const;
  Mat2 inside(double t, double s) const;

  PulseShape pulse_;
  double gamma_;
  std::vector<double> anchors_;
  std::vector<Block> blocks_;
};

/// Inclusive density f_n(t_1..t_n) from alternating no-jump propagation and
/// jumps. Integrates the ODE directly; n <= 4.
double exact_density_fn(const PulseShape& p, const SystemParams& sys, std::span<const double> times);
/// Same quantity evaluated through a propagator table.
double exact_density_fn(const ConditionalPropagator& u, std::span<const double> times);

/// Exact inclusive probability F_n, 1 <= n <= 4. The integral over the last
/// emission time is done in closed form from the survival norm.
Estimate exact_Fn(const ConditionalPropagator& u, int n, const QuadratureConfig& cfg = {});

/// P_0..P_nmax, 1 <= nmax <= 3, from exact_Fn.
PhotocountDistribution exact_distribution(const PulseShape& p, const SystemParams& sys, int nmax,
                                          const QuadratureConfig& cfg = {});

struct TrajectoryRecord {
  std::vector<double> emission_times;
  int count = 0;
  /// Normalized conditional state at the horizon.
  TwoLevelState final_state;
  /// Seed of this trajectory's own sub-stream.
  std::uint64_t seed = 0;
};

/// Default sampling horizon T + 20/gamma.
double default_horizon(const PulseShape& p, const SystemParams& sys);

/// Jump trajectories by the inverse-CDF method. Trajectory i draws from
/// stream.substream(i), so results do not depend on the worker count.
std::vector<TrajectoryRecord> sample_trajectories(const PulseShape& p, const SystemParams& sys, std::size_t n_traj,
                                                  const numerics::RandomStream& stream, double t_horizon,
                                                  const TwoLevelState& initial = TwoLevelState::ground(),
                                                  unsigned workers = 0);
/// Same, reusing a propagator table.
std::vector<TrajectoryRecord> sample_trajectories(const ConditionalPropagator& u, std::size_t n_traj,
                                                  const numerics::RandomStream& stream, double t_horizon,
                                                  const TwoLevelState& initial = TwoLevelState::ground(),
                                                  unsigned workers = 0);

/// Empirical distribution of emission counts with binomial standard errors.
PhotocountDistribution histogram_distribution(std::span<const TrajectoryRecord> records, int nmax);

struct DensityMatrix2 {
  double gg = 1.0;
  double ee = 0.0;
  std::complex<double> ge{0.0, 0.0};

  double trace() const { return gg + ee; }
  std::complex<double> eg() const { return std::conj(ge); }
  /// Smallest eigenvalue of the Hermitian matrix.
  double min_eigenvalue() const;
};

/// ρ(t) from the Lindblad equation with decay channel √γ σ; starts in `initial` at t = 0.
DensityMatrix2 master_equation_rho(const PulseShape& p, const SystemParams& sys, double t,
                                   const DensityMatrix2& initial = {}, const OdeConfig& cfg = oracle_ode_config());
/// ρ at every entry of an ordered list of times.
std::vector<DensityMatrix2> master_equation_rho(const PulseShape& p, const SystemParams& sys,
                                                std::span<const double> times, const DensityMatrix2& initial = {},
                                                const OdeConfig& cfg = oracle_ode_config());

/// Untruncated photon-number moments E[n] and E[n(n−1)] of the full pulse
/// cycle, from the master equation for the counting moments.
struct ExactMoments {
  double mean = 0.0;
  double factorial2 = 0.0;
};
ExactMoments exact_moments(const PulseShape& p, const SystemParams& sys, const OdeConfig& cfg = oracle_ode_config());

/// Photocount distribution from the photon-number-resolved master equation.
/// Independent of exact_distribution; the truncation bound is the exact
/// probability of more than nmax photons.
PhotocountDistribution resolved_distribution(const PulseShape& p, const SystemParams& sys, int nmax,
                                             const OdeConfig& cfg = oracle_ode_config());

/// G²(t1, t2) sampled on a rectangular grid, row-major over t1.
struct TwoTimeCorrelation {
  std::vector<double> t1_grid;
  std::vector<double> t2_grid;
  std::vector<double> values;
  /// γ ρ_ee on each grid: the emission rate.
  std::vector<double> intensity_t1;
  std::vector<double> intensity_t2;

  double at(std::size_t i, std::size_t j) const { return values[i * t2_grid.size() + j]; }
};

/// Quantum-regression G²: γ² ρ_ee(a) times the excited population at b of
/// the system reset to |g> at a, with a = min(t1, t2) and b = max(t1, t2).
/// Rows are marched together across the union grid with 4x4 step matrices.
TwoTimeCorrelation g2_two_time(const PulseShape& p, const SystemParams& sys, std::span<const double> t1_grid,
                               std::span<const double> t2_grid, const OdeConfig& cfg = oracle_ode_config());

/// Grid with n_inside points on [0, W] and n_after points on (W, horizon].
std::vector<double> correlation_grid(const PulseShape& p, const SystemParams& sys, std::size_t n_inside,
                                     std::size_t n_after, double horizon);

/// Pulse-wise g²[0] = ∬G² / (∫γρ_ee)² by the trapezoid rule; square grids only.
struct PulsewiseCoherence {
  double pair_integral = 0.0;
  double mean = 0.0;
  double g2 = 0.0;
};
PulsewiseCoherence pulsewise_g2(const TwoTimeCorrelation& c);

}  // namespace pulsedtls::oracle
