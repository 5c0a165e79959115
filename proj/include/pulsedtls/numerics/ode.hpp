#pragma once

// Explicit Runge-Kutta integrators for small fixed-size real systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsedtls::numerics {

enum class OdeMethod { ClassicalRk4, DormandPrince45 };

struct OdeConfig {
  OdeMethod method = OdeMethod::DormandPrince45;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("ODE tolerances must be > 0");
    if (!(max_step > 0.0)) throw std::invalid_argument("ODE max_step must be > 0");
    if (method == OdeMethod::ClassicalRk4 && !std::isfinite(max_step))
      throw std::invalid_argument("fixed-step RK4 needs a finite max_step");
  }
};

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

template <std::size_t N>
inline State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// One classical 4th-order Runge-Kutta step of size h.
template <std::size_t N, class Rhs>
State<N> rk4_step(Rhs& rhs, double t, const State<N>& y, double h) {
  State<N> k1, k2, k3, k4;
  rhs(t, y, k1);
  rhs(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k1}}), k2);
  rhs(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k2}}), k3);
  rhs(t + h, detail::axpy<N>(y, h, {{1.0, &k3}}), k4);
  State<N> out = y;
  for (std::size_t i = 0; i < N; ++i) out[i] += h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  return out;
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b* (difference between the 5th and embedded 4th order weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <std::size_t N, class Rhs>
class DopriStepper {
 public:
  DopriStepper(Rhs& rhs, const OdeConfig& cfg) : rhs_(rhs), cfg_(cfg) {}

  // Advances (t, y) to t_end exactly. k1 carries the FSAL derivative.
  void advance(double& t, State<N>& y, double t_end, double& h, long& steps) {
    using D = Dopri;
    State<N> k1, k2, k3, k4, k5, k6, k7;
    rhs_(t, y, k1);
    if (h <= 0.0) h = initial_step(t, y, k1, t_end);
    while (t < t_end) {
      if (++steps > cfg_.max_steps) throw OdeError("ODE integration exceeded max_steps");
      double step = std::min({h, cfg_.max_step, t_end - t});
      // Stretch a step that would leave a sliver shorter than 1e-3 of itself.
      const bool last = (t + step * (1.0 + 1e-3) >= t_end);
      if (last) step = t_end - t;
      if (!last && step < 1e-14 * std::max(1.0, std::abs(t)))
        throw OdeError("ODE step size underflow at t = " + std::to_string(t));
      rhs_(t + D::c2 * step, axpy<N>(y, step, {{D::a21, &k1}}), k2);
      rhs_(t + D::c3 * step, axpy<N>(y, step, {{D::a31, &k1}, {D::a32, &k2}}), k3);
      rhs_(t + D::c4 * step, axpy<N>(y, step, {{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}}), k4);
      rhs_(t + D::c5 * step, axpy<N>(y, step, {{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}}), k5);
      rhs_(t + step,
           axpy<N>(y, step, {{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}}), k6);
      const State<N> y_new =
          axpy<N>(y, step, {{D::b1, &k1}, {D::b3, &k3}, {D::b4, &k4}, {D::b5, &k5}, {D::b6, &k6}});
      rhs_(t + step, y_new, k7);
      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = step * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] + D::e6 * k6[i] +
                                 D::e7 * k7[i]);
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));
      if (!std::isfinite(err)) throw OdeError("ODE right-hand side produced a non-finite value");
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = last ? t_end : t + step;
        y = y_new;
        k1 = k7;
        if (!last || factor < 1.0) h = step * factor;
      } else {
        h = step * std::max(factor, 0.2);
      }
    }
  }

 private:
  double initial_step(double t, const State<N>& y, const State<N>& f0, double t_end) const {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, t_end - t);
    return std::max(h, 1e-12 * std::max(1.0, std::abs(t)));
  }

  Rhs& rhs_;
  const OdeConfig& cfg_;
};

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) and returns the state at every entry of
/// `times` (non-decreasing; times[0] is the initial time). The integrator
/// lands exactly on every output time and every breakpoint, so discontinuities
/// of the right-hand side at breakpoints cost nothing in accuracy.
///
/// rhs signature: void(double t, const State<N>& y, State<N>& dydt).
template <std::size_t N, class Rhs>
std::vector<State<N>> integrate_ode(Rhs&& rhs, const State<N>& y0, std::span<const double> times,
                                    const OdeConfig& cfg = {}, std::span<const double> breakpoints = {}) {
  cfg.validate();
  if (times.empty()) throw std::invalid_argument("integrate_ode: no output times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] >= times[i - 1])) throw std::invalid_argument("integrate_ode: output times must be ordered");

  std::vector<State<N>> out;
  out.reserve(times.size());
  out.push_back(y0);
  State<N> y = y0;
  double t = times.front();
  double h = 0.0;
  long steps = 0;
  detail::DopriStepper<N, std::remove_reference_t<Rhs>> dopri(rhs, cfg);

  auto advance_to = [&](double t_end) {
    if (t_end <= t) return;
    if (cfg.method == OdeMethod::ClassicalRk4) {
      const double len = t_end - t;
      const long n = std::max(1L, static_cast<long>(std::ceil(len / cfg.max_step - 1e-12)));
      const double step = len / static_cast<double>(n);
      for (long i = 0; i < n; ++i) y = rk4_step<N>(rhs, t + static_cast<double>(i) * step, y, step);
      t = t_end;
    } else {
      dopri.advance(t, y, t_end, h, steps);
    }
  };

  std::size_t bp = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    while (bp < breakpoints.size() && breakpoints[bp] <= times[i]) {
      if (breakpoints[bp] > t) advance_to(breakpoints[bp]);
      ++bp;
    }
    advance_to(times[i]);
    out.push_back(y);
  }
  return out;
}

}  // namespace pulsedtls::numerics
