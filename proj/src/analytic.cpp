#include "pulsedtls/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pulsedtls/simd/kernels.hpp"

namespace pulsedtls::analytic {

namespace {

using numerics::integrate_1d;
using numerics::integrate_simplex;
using numerics::require_converged;

double s2(double x) {
  const double s = std::sin(0.5 * x);
  return s * s;
}

// Per-call constants shared by every density.
struct Model {
  const PulseShape& p;
  double gamma;
  double W;
  double T;
  double A_inf;
  double pref;  // exp(-γT/2)
  std::vector<double> breaks;

  Model(const PulseShape& pulse, const SystemParams& sys)
      : p(pulse),
        gamma(sys.gamma),
        W(pulse.window_end()),
        T(pulse.width()),
        A_inf(pulse.total_area()),
        pref(std::exp(-0.5 * sys.gamma * pulse.width())),
        breaks(pulse.breakpoints()) {
    sys.validate();
  }

  double A(double t) const { return p.cumulative_area(t); }

  std::vector<double> breaks_with(double x) const {
    std::vector<double> b = breaks;
    b.push_back(x);
    return b;
  }

  double f2(double t1, double t2) const {
    const std::array<double, 2> t{t1, t2};
    return density_fn(p, SystemParams{gamma}, t);
  }

  double f3(double t1, double t2, double t3) const {
    const std::array<double, 3> t{t1, t2, t3};
    return density_fn(p, SystemParams{gamma}, t);
  }

  // ∫_{t2}^∞ f3(t1, t2, t3) dt3 for t1 < t2.
  Estimate f3_tail(double t1, double t2, const QuadratureConfig& cfg) const {
    if (t2 >= W) return {};
    const double a1 = A(t1);
    const double a2 = A(t2);
    const double after = gamma * gamma * s2(a1) * s2(a2 - a1) * s2(A_inf - a2) * pref;
    if (after == 0.0) return {};
    auto r = require_converged(
        integrate_1d([&](double t3) { return f3(t1, t2, t3); }, t2, W, cfg, breaks), "three-emission tail");
    return {r.value + after, r.error};
  }

  // γ³ s(A∞−A(b)) s(A(b)−A(a)) s(A(a)): ordered triple density without its time factor.
  double ordered3(double a, double b) const {
    const double aa = A(a);
    const double ab = A(b);
    return gamma * gamma * gamma * s2(A_inf - ab) * s2(ab - aa) * s2(aa);
  }

  // Symmetrized three-emission density with the third time integrated out.
  Estimate p3_pair(double t1, double t2, const QuadratureConfig& cfg) const {
    if (t1 == t2) return {};
    const double a = std::min(t1, t2);
    const double b = std::max(t1, t2);
    if (a >= W) return {};
    const double aa = A(a);
    const double eb = std::exp(-gamma * b);
    const double g3 = gamma * gamma * gamma;
    auto first = integrate_1d(
        [&](double x) {
          const double ax = A(x);
          return g3 * s2(A_inf - aa) * s2(aa - ax) * s2(ax);
        },
        0.0, a, cfg, breaks);
    auto middle = integrate_1d(
        [&](double x) {
          const double ax = A(x);
          return g3 * s2(A_inf - ax) * s2(ax - aa) * s2(aa);
        },
        a, std::min(b, W), cfg, breaks);
    require_converged(first, "three-emission pair density");
    require_converged(middle, "three-emission pair density");
    double value = (first.value + middle.value) * eb;
    if (b < W) value += ordered3(a, b) / gamma * eb;
    return {value / 6.0, (first.error + middle.error) * eb / 6.0};
  }
};

void check_times(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("density needs at least one emission time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0)
      throw std::invalid_argument("emission times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("emission times must be strictly increasing");
  }
}

}  // namespace

double ideal_excited_prob(double a) { return s2(a); }

double no_emission_time(const PulseShape& p, double t) {
  if (t >= p.window_end()) return p.width();
  if (p.total_area() > 0.0) return p.width() * p.cumulative_area(t) / p.total_area();
  return std::min(t, p.width());
}

double density_fn(const PulseShape& p, const SystemParams& sys, std::span<const double> times) {
  sys.validate();
  check_times(times);
  const std::size_t n = times.size();
  const double W = p.window_end();
  if (n >= 2 && times[n - 2] >= W) return 0.0;
  double value = 1.0;
  double a_prev = 0.0;
  for (double t : times) {
    const double a = p.cumulative_area(t);
    value *= sys.gamma * s2(a - a_prev);
    a_prev = a;
  }
  const double t_last = times[n - 1];
  if (t_last < W) return value * std::exp(-0.5 * sys.gamma * no_emission_time(p, t_last));
  return value * std::exp(-0.5 * sys.gamma * p.width()) * std::exp(-sys.gamma * (t_last - W));
}

Estimate inclusive_Fn(const PulseShape& p, const SystemParams& sys, int n, const QuadratureConfig& cfg) {
  if (n < 1 || n > 4) throw std::invalid_argument("inclusive_Fn supports 1 <= n <= 4");
  const Model m(p, sys);
  constexpr std::size_t kChunk = 16;

  if (n == 1) {
    // Window integrand cos²(A∞/2)·sin²(A/2) − ¼·sin A∞·sin A plus s2(A∞)·γT/2 in the
    // post-pulse term. For a square pulse this equals ∫γ sin²(A/2) dt term by term;
    // unlike that form it vanishes where A(t) is flat, so long pulse tails add nothing.
    const double c2 = 1.0 - s2(m.A_inf);
    const double q = 0.25 * std::sin(m.A_inf);
    auto f = [&](std::span<const double> x, std::span<double> out) {
      for (std::size_t off = 0; off < x.size(); off += kChunk) {
        const std::size_t len = std::min(kChunk, x.size() - off);
        std::array<double, kChunk> a{};
        p.cumulative_area(x.subspan(off, len), std::span<double>(a.data(), len));
        auto o = out.subspan(off, len);
        simd::sin2_half(std::span<const double>(a.data(), len), o);
        for (std::size_t i = 0; i < len; ++i) o[i] = c2 * o[i] - q * std::sin(a[i]);
      }
    };
    auto r = require_converged(integrate_1d(f, 0.0, m.W, cfg, m.breaks), "F_1 quadrature");
    const double post = s2(m.A_inf) * (1.0 + 0.5 * m.gamma * p.width());
    return {m.pref * (m.gamma * r.value + post), m.pref * m.gamma * r.error};
  }

  // Integrand over 0 <= t_1 <= ... <= t_{n-1} <= W:
  //   Π_k sin²((A_k − A_{k−1})/2) · sin²((A∞ − A_{n−1})/2)
  auto f = [&](std::span<const double> outer, std::span<const double> x, std::span<double> out) {
    double prefix = 1.0;
    double a_prev = 0.0;
    for (double t : outer) {
      const double a = m.A(t);
      prefix *= s2(a - a_prev);
      a_prev = a;
    }
    for (std::size_t off = 0; off < x.size(); off += kChunk) {
      const std::size_t len = std::min(kChunk, x.size() - off);
      std::array<double, kChunk> a{}, d1{}, d2{};
      p.cumulative_area(x.subspan(off, len), std::span<double>(a.data(), len));
      for (std::size_t i = 0; i < len; ++i) {
        d1[i] = a[i] - a_prev;
        d2[i] = m.A_inf - a[i];
      }
      auto o = out.subspan(off, len);
      simd::sin2_half(std::span<const double>(d1.data(), len), o);
      simd::sin2_half(std::span<const double>(d2.data(), len), std::span<double>(a.data(), len));
      simd::multiply_inplace(o, std::span<const double>(a.data(), len));
      for (auto& v : o) v *= prefix;
    }
  };
  auto r = require_converged(integrate_simplex(f, n - 1, m.W, cfg, m.breaks), "F_n quadrature");
  const double scale = m.pref * std::pow(m.gamma, n - 1);
  return {scale * r.value, scale * r.error};
}

PhotocountDistribution exclusive_Pn(const PulseShape& p, const SystemParams& sys, int nmax,
                                    const QuadratureConfig& cfg) {
  if (nmax < 1 || nmax > 3) throw std::invalid_argument("exclusive_Pn supports 1 <= nmax <= 3");
  std::vector<double> f;
  double err = 0.0;
  for (int n = 1; n <= nmax + 1; ++n) {
    const Estimate e = inclusive_Fn(p, sys, n, cfg);
    f.push_back(e.value);
    err += e.error;
  }
  auto d = PhotocountDistribution::from_inclusive(std::move(f), err, Provenance::AnalyticShortPulse);
  d.validate();
  return d;
}

Estimate marginal_p1(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg) {
  const Model m(p, sys);
  const std::array<double, 1> t{t1};
  const double f1 = density_fn(p, sys, t);
  if (t1 >= m.W) return {f1, 0.0};
  const double a1 = m.A(t1);
  const double after = m.gamma * s2(a1) * s2(m.A_inf - a1) * m.pref;
  auto r = require_converged(integrate_1d([&](double t2) { return t2 > t1 ? m.f2(t1, t2) : 0.0; }, t1, m.W, cfg,
                                          m.breaks),
                             "p1 quadrature");
  return {f1 - r.value - after, r.error};
}

double marginal_p1_short_pulse(const PulseShape& p, const SystemParams& sys, double t1) {
  sys.validate();
  const double a1 = p.cumulative_area(t1);
  const double c = std::cos(0.5 * (p.total_area() - a1));
  return sys.gamma * s2(a1) * c * c;
}

Estimate marginal_p2(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg) {
  const Model m(p, sys);
  if (!(t1 >= 0.0)) throw std::invalid_argument("t1 must be >= 0");
  if (t1 >= m.W) return {};
  const double a1 = m.A(t1);
  const double after = m.gamma * s2(a1) * s2(m.A_inf - a1) * m.pref;
  const QuadratureConfig inner = cfg.tightened();
  auto g = [&](double t2) -> Estimate {
    if (!(t2 > t1)) return {};
    const Estimate tail = m.f3_tail(t1, t2, inner);
    return {m.f2(t1, t2) - tail.value, tail.error};
  };
  auto r = require_converged(integrate_1d(g, t1, m.W, cfg, m.breaks), "p2 quadrature");
  return {r.value + after, r.error};
}

double marginal_p2_short_pulse(const PulseShape& p, const SystemParams& sys, double t1) {
  sys.validate();
  const double a1 = p.cumulative_area(t1);
  return sys.gamma * std::exp(-0.5 * sys.gamma * p.width()) * s2(p.total_area() - a1) * s2(a1);
}

Estimate density_p2_joint(const PulseShape& p, const SystemParams& sys, double t1, double t2,
                          const QuadratureConfig& cfg) {
  if (!(t1 >= 0.0) || !(t2 > t1)) throw std::invalid_argument("density_p2_joint requires 0 <= t1 < t2");
  const Model m(p, sys);
  const Estimate tail = m.f3_tail(t1, t2, cfg);
  return {m.f2(t1, t2) - tail.value, tail.error};
}

double density_p3(const PulseShape& p, const SystemParams& sys, double t1, double t2, double t3) {
  const std::array<double, 3> t{t1, t2, t3};
  check_times(t);
  const Model m(p, sys);
  if (t2 >= m.W) return 0.0;
  return m.ordered3(t1, t2) * std::exp(-m.gamma * t3);
}

double density_p3_sym(const PulseShape& p, const SystemParams& sys, double t1, double t2, double t3) {
  std::array<double, 3> t{t1, t2, t3};
  for (double x : t)
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("emission times must be finite and >= 0");
  std::sort(t.begin(), t.end());
  if (t[0] == t[1] || t[1] == t[2]) return 0.0;
  return density_p3(p, sys, t[0], t[1], t[2]) / 6.0;
}

Estimate density_p3_sym_pair(const PulseShape& p, const SystemParams& sys, double t1, double t2,
                             const QuadratureConfig& cfg) {
  if (!(t1 >= 0.0) || !(t2 >= 0.0)) throw std::invalid_argument("emission times must be >= 0");
  const Model m(p, sys);
  return m.p3_pair(t1, t2, cfg);
}

Estimate density_p3_sym_single(const PulseShape& p, const SystemParams& sys, double t1,
                               const QuadratureConfig& cfg) {
  if (!(t1 >= 0.0)) throw std::invalid_argument("t1 must be >= 0");
  const Model m(p, sys);
  const QuadratureConfig inner = cfg.tightened();
  auto r = require_converged(integrate_1d([&](double t2) { return m.p3_pair(t1, t2, inner); }, 0.0, m.W, cfg,
                                          t1 < m.W ? m.breaks_with(t1) : m.breaks),
                             "p3 single-time quadrature");
  Estimate out{r.value, r.error};
  if (t1 < m.W) {
    const Estimate edge = m.p3_pair(t1, m.W, inner);
    out.value += edge.value / m.gamma;
    out.error += edge.error / m.gamma;
  }
  return out;
}

Estimate marginal_p3(const PulseShape& p, const SystemParams& sys, double t1, const QuadratureConfig& cfg) {
  if (!(t1 >= 0.0)) throw std::invalid_argument("t1 must be >= 0");
  const Model m(p, sys);
  if (t1 >= m.W) return {};
  auto r = require_converged(
      integrate_1d([&](double t2) { return m.ordered3(t1, t2) * std::exp(-m.gamma * t2) / m.gamma; }, t1, m.W,
                   cfg, m.breaks),
      "p3 marginal quadrature");
  return {r.value, r.error};
}

Estimate emission_flux(const PulseShape& p, const SystemParams& sys, double t, const QuadratureConfig& cfg) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  const Model m(p, sys);
  const Estimate one = marginal_p1(p, sys, t, cfg);
  const Estimate two_first = marginal_p2(p, sys, t, cfg);
  const QuadratureConfig inner = cfg.tightened();
  auto second = require_converged(
      integrate_1d(
          [&](double t1) -> Estimate {
            if (!(t1 < t)) return {};
            return density_p2_joint(p, sys, t1, t, inner);
          },
          0.0, std::min(t, m.W), cfg, m.breaks),
      "flux quadrature");
  const Estimate three = density_p3_sym_single(p, sys, t, cfg);
  return {one.value + two_first.value + second.value + 3.0 * three.value,
          one.error + two_first.error + second.error + 3.0 * three.error};
}

double poisson_limit_Fn(double gammaT, int n) {
  if (!(gammaT >= 0.0) || !std::isfinite(gammaT)) throw std::invalid_argument("gammaT must be finite and >= 0");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const double x = 0.5 * gammaT;
  return std::pow(x, n - 1) / std::tgamma(n) * std::exp(-x);
}

}  // namespace pulsedtls::analytic
