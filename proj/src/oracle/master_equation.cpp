#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "common.hpp"
#include "pulsedtls/oracle.hpp"

namespace pulsedtls::oracle {

namespace {

using numerics::State;

void check_ordered(std::span<const double> t, const char* what) {
  if (t.empty()) throw std::invalid_argument(std::string(what) + ": empty time grid");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || t[i] < 0.0) throw std::invalid_argument(std::string(what) + ": times must be >= 0");
    if (i > 0 && t[i] < t[i - 1]) throw std::invalid_argument(std::string(what) + ": times must be ordered");
  }
}

State<4> to_vec(const DensityMatrix2& r) { return {r.gg, r.ee, r.ge.real(), r.ge.imag()}; }
DensityMatrix2 from_vec(const double* v) { return {v[0], v[1], {v[2], v[3]}}; }

}  // namespace

double DensityMatrix2::min_eigenvalue() const {
  const double d = gg - ee;
  return 0.5 * (trace() - std::sqrt(d * d + 4.0 * std::norm(ge)));
}

std::vector<DensityMatrix2> master_equation_rho(const PulseShape& p, const SystemParams& sys,
                                                std::span<const double> times, const DensityMatrix2& initial,
                                                const OdeConfig& cfg) {
  sys.validate(true);
  check_ordered(times, "master_equation_rho");
  std::vector<double> t{0.0};
  t.insert(t.end(), times.begin(), times.end());
  const double gamma = sys.gamma;
  auto rhs = [&](double s, const State<4>& y, State<4>& dy) {
    detail::lindblad_rhs(p.envelope(s), gamma, y.data(), dy.data());
  };
  const auto ys = numerics::integrate_ode<4>(rhs, to_vec(initial), t, cfg, detail::pulse_breakpoints(p));
  std::vector<DensityMatrix2> out;
  out.reserve(times.size());
  for (std::size_t i = 1; i < ys.size(); ++i) out.push_back(from_vec(ys[i].data()));
  return out;
}

DensityMatrix2 master_equation_rho(const PulseShape& p, const SystemParams& sys, double t,
                                   const DensityMatrix2& initial, const OdeConfig& cfg) {
  const std::array<double, 1> times{t};
  return master_equation_rho(p, sys, times, initial, cfg).front();
}

ExactMoments exact_moments(const PulseShape& p, const SystemParams& sys, const OdeConfig& cfg) {
  sys.validate();
  const double gamma = sys.gamma;
  // (ρ, ρ¹, ρ²): dρ¹ = Lρ¹ + Jρ and dρ² = Lρ² + 2Jρ¹, with J moving γρ_ee into ρ_gg.
  auto rhs = [&](double s, const State<12>& y, State<12>& dy) {
    const double omega = p.envelope(s);
    for (int k = 0; k < 3; ++k) detail::lindblad_rhs(omega, gamma, y.data() + 4 * k, dy.data() + 4 * k);
    dy[4] += gamma * y[1];
    dy[8] += 2.0 * gamma * y[5];
  };
  State<12> y0{};
  y0[0] = 1.0;
  const std::array<double, 2> t{0.0, p.window_end()};
  const auto ys = numerics::integrate_ode<12>(rhs, y0, t, cfg, p.breakpoints());
  const auto& y = ys.back();
  // After the pulse every remaining excitation is emitted exactly once.
  return {y[4] + y[5] + y[1], y[8] + y[9] + 2.0 * y[5]};
}

PhotocountDistribution resolved_distribution(const PulseShape& p, const SystemParams& sys, int nmax,
                                             const OdeConfig& cfg) {
  if (nmax < 1 || nmax > 3) throw std::invalid_argument("resolved_distribution supports 1 <= nmax <= 3");
  sys.validate();
  const double gamma = sys.gamma;
  constexpr int kTracked = 4;  // ρ_0..ρ_3 and one block for four or more
  auto rhs = [&](double s, const State<20>& y, State<20>& dy) {
    const double omega = p.envelope(s);
    for (int k = 0; k <= kTracked; ++k) detail::no_jump_rhs(omega, gamma, y.data() + 4 * k, dy.data() + 4 * k);
    for (int k = 1; k <= kTracked; ++k) dy[4 * k] += gamma * y[4 * (k - 1) + 1];
    dy[4 * kTracked] += gamma * y[4 * kTracked + 1];
  };
  State<20> y0{};
  y0[0] = 1.0;
  const std::array<double, 2> t{0.0, p.window_end()};
  const auto ys = numerics::integrate_ode<20>(rhs, y0, t, cfg, p.breakpoints());
  const auto& y = ys.back();
  PhotocountDistribution d;
  d.provenance = Provenance::ExactOracle;
  double total = 0.0;
  for (int k = 0; k <= nmax; ++k) {
    const double pk = y[static_cast<std::size_t>(4 * k)] + (k > 0 ? y[static_cast<std::size_t>(4 * (k - 1) + 1)] : 0.0);
    d.exclusive.push_back(pk);
    total += pk;
  }
  d.truncation_bound = std::max(0.0, 1.0 - total);
  double tail = d.truncation_bound;
  d.inclusive.assign(static_cast<std::size_t>(nmax), 0.0);
  for (int k = nmax; k >= 1; --k) {
    tail += d.exclusive[static_cast<std::size_t>(k)];
    d.inclusive[static_cast<std::size_t>(k - 1)] = tail;
  }
  d.quad_error = 10.0 * cfg.rel_tol;
  return d;
}

TwoTimeCorrelation g2_two_time(const PulseShape& p, const SystemParams& sys, std::span<const double> t1_grid,
                               std::span<const double> t2_grid, const OdeConfig& cfg) {
  sys.validate();
  check_ordered(t1_grid, "g2_two_time");
  check_ordered(t2_grid, "g2_two_time");
  std::vector<double> u{0.0};
  u.insert(u.end(), t1_grid.begin(), t1_grid.end());
  u.insert(u.end(), t2_grid.begin(), t2_grid.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const std::size_t n = u.size();

  const double gamma = sys.gamma;
  const auto bps = detail::pulse_breakpoints(p);
  auto rhs = [&](double s, const State<16>& m, State<16>& dm) {
    const double omega = p.envelope(s);
    for (int j = 0; j < 4; ++j) {
      const double v[4] = {m[j], m[4 + j], m[8 + j], m[12 + j]};
      double dv[4];
      detail::lindblad_rhs(omega, gamma, v, dv);
      for (int i = 0; i < 4; ++i) dm[static_cast<std::size_t>(4 * i + j)] = dv[i];
    }
  };
  State<16> identity{};
  for (int i = 0; i < 4; ++i) identity[static_cast<std::size_t>(5 * i)] = 1.0;

  // Row r holds the state reset to |g> at u[r]; all active rows advance together.
  std::vector<double> c0(n, 0.0), c1(n, 0.0), c2(n, 0.0), c3(n, 0.0);
  std::vector<double> ee(n * n, 0.0);  // ee[r * n + k]: excited population of row r at u[k]
  c0[0] = 1.0;
  const auto& kern = simd::kernels();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::array<double, 2> span{u[k], u[k + 1]};
    const auto step = numerics::integrate_ode<16>(rhs, identity, span, cfg, bps).back();
    kern.mat4_apply(step, c0.data(), c1.data(), c2.data(), c3.data(), k + 1);
    c0[k + 1] = 1.0;
    for (std::size_t r = 0; r <= k; ++r) ee[r * n + k + 1] = c1[r];
  }

  auto index = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), t) - u.begin());
  };
  TwoTimeCorrelation out;
  out.t1_grid.assign(t1_grid.begin(), t1_grid.end());
  out.t2_grid.assign(t2_grid.begin(), t2_grid.end());
  out.values.resize(t1_grid.size() * t2_grid.size());
  auto rate = [&](std::size_t k) { return gamma * ee[k]; };  // row 0 starts at t = 0 in |g>
  for (double t : t1_grid) out.intensity_t1.push_back(rate(index(t)));
  for (double t : t2_grid) out.intensity_t2.push_back(rate(index(t)));
  for (std::size_t i = 0; i < t1_grid.size(); ++i) {
    for (std::size_t j = 0; j < t2_grid.size(); ++j) {
      const std::size_t a = index(std::min(t1_grid[i], t2_grid[j]));
      const std::size_t b = index(std::max(t1_grid[i], t2_grid[j]));
      out.values[i * t2_grid.size() + j] = rate(a) * gamma * ee[a * n + b];
    }
  }
  return out;
}

std::vector<double> correlation_grid(const PulseShape& p, const SystemParams& sys, std::size_t n_inside,
                                     std::size_t n_after, double horizon) {
  sys.validate();
  if (n_inside < 2) throw std::invalid_argument("correlation_grid needs at least two points inside the pulse");
  const double W = p.window_end();
  if (n_after > 0 && !(horizon > W)) throw std::invalid_argument("correlation_grid horizon must exceed the pulse");
  std::vector<double> g;
  g.reserve(n_inside + n_after);
  for (std::size_t i = 0; i < n_inside; ++i) g.push_back(W * static_cast<double>(i) / static_cast<double>(n_inside - 1));
  g.back() = W;
  for (std::size_t i = 1; i <= n_after; ++i)
    g.push_back(W + (horizon - W) * static_cast<double>(i) / static_cast<double>(n_after));
  return g;
}

PulsewiseCoherence pulsewise_g2(const TwoTimeCorrelation& c) {
  if (c.t1_grid != c.t2_grid || c.t1_grid.size() < 2)
    throw std::invalid_argument("pulsewise_g2 needs identical t1 and t2 grids with >= 2 points");
  const auto& t = c.t1_grid;
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (t[i + 1] - t[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  PulsewiseCoherence out;
  for (std::size_t i = 0; i < n; ++i) {
    out.mean += w[i] * c.intensity_t1[i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += w[j] * c.values[i * n + j];
    out.pair_integral += w[i] * row;
  }
  if (!(out.mean > 0.0)) throw std::domain_error("pulsewise_g2: no emission on the grid");
  out.g2 = out.pair_integral / (out.mean * out.mean);
  return out;
}

}  // namespace pulsedtls::oracle
