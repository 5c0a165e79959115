#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature and nested quadrature over ordered
// time simplices 0 <= t1 <= ... <= tn <= T.
//
// Integrands may be scalar (double -> double) or batched: the batched form
// receives all 15 Kronrod nodes of a panel at once, which lets callers run
// the arithmetic through the SIMD kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace pulsedtls::numerics {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 1 << 15;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be > 0");
    if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
  }

  /// Configuration for the next-inner level of a nested integral.
  QuadratureConfig tightened(double factor = 10.0) const {
    return {rel_tol / factor, abs_tol / factor, max_subdivisions};
  }
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  int subdivisions = 0;
  bool converged = true;
};

/// Raised by callers that require convergence; carries the partial result.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadratureResult& partial() const { return partial_; }

 private:
  QuadratureResult partial_;
};

inline const QuadratureResult& require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged) throw QuadratureError(std::string(what) + ": subdivision limit reached", r);
  return r;
}

namespace detail {

inline constexpr int kKronrodPoints = 15;

// Abscissae of the 15-point Kronrod rule on [-1, 1]; odd indices are the
// 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Node layout used for batched evaluation: [center, -x0, +x0, -x1, +x1, ...].
inline std::array<double, kKronrodPoints> panel_nodes(double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, kKronrodPoints> x{};
  x[0] = c;
  for (int j = 0; j < 7; ++j) {
    x[1 + 2 * j] = c - h * kXgk[j];
    x[2 + 2 * j] = c + h * kXgk[j];
  }
  return x;
}

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double rule_error = 0.0;   // |Kronrod - Gauss|, shrinks under bisection
  double inner_error = 0.0;  // integrated error of inner integrals
  bool operator<(const Panel& o) const { return rule_error < o.rule_error; }
};

template <class Batch>
Panel evaluate_panel(Batch& f, double a, double b) {
  const auto x = panel_nodes(a, b);
  std::array<double, kKronrodPoints> v{};
  std::array<double, kKronrodPoints> e{};
  f(std::span<const double>(x), std::span<double>(v), std::span<double>(e));
  const double h = 0.5 * (b - a);
  double kron = kWgk[7] * v[0];
  double gauss = kWg[3] * v[0];
  double err_int = kWgk[7] * std::abs(e[0]);
  for (int j = 0; j < 7; ++j) {
    const double pair = v[1 + 2 * j] + v[2 + 2 * j];
    kron += kWgk[j] * pair;
    err_int += kWgk[j] * (std::abs(e[1 + 2 * j]) + std::abs(e[2 + 2 * j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kron * h;
  p.rule_error = std::abs((kron - gauss) * h);
  p.inner_error = err_int * std::abs(h);
  return p;
}

template <class F>
auto make_batch(F& f) {
  using CD = std::span<const double>;
  using D = std::span<double>;
  if constexpr (std::is_invocable_v<F&, CD, D, D>) {
    return [&f](CD x, D v, D e) { f(x, v, e); };
  } else if constexpr (std::is_invocable_v<F&, CD, D>) {
    return [&f](CD x, D v, D e) {
      f(x, v);
      std::fill(e.begin(), e.end(), 0.0);
    };
  } else if constexpr (std::is_invocable_r_v<Estimate, F&, double> &&
                       std::is_same_v<std::invoke_result_t<F&, double>, Estimate>) {
    return [&f](CD x, D v, D e) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const Estimate r = f(x[i]);
        v[i] = r.value;
        e[i] = r.error;
      }
    };
  } else {
    static_assert(std::is_invocable_r_v<double, F&, double>, "unsupported integrand signature");
    return [&f](CD x, D v, D e) {
      for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(x[i]);
      std::fill(e.begin(), e.end(), 0.0);
    };
  }
}

}  // namespace detail

/// Globally adaptive 1-D quadrature on [a, b]. `breakpoints` inside (a, b)
/// seed the initial partition. Never throws on non-convergence: the result
/// carries `converged = false` and the partial value.
template <class F>
QuadratureResult integrate_1d(F&& f, double a, double b, const QuadratureConfig& cfg = {},
                              std::span<const double> breakpoints = {}) {
  cfg.validate();
  if (!(a <= b)) throw std::invalid_argument("integrate_1d: requires a <= b");
  QuadratureResult out;
  if (a == b) return out;
  auto batch = detail::make_batch(f);

  std::vector<double> edges{a};
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double rule_err = 0.0;
  double inner_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = detail::evaluate_panel(batch, edges[i], edges[i + 1]);
    total += p.value;
    rule_err += p.rule_error;
    inner_err += p.inner_error;
    heap.push(p);
    out.evaluations += detail::kKronrodPoints;
  }

  auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
  while (rule_err > tolerance()) {
    if (out.subdivisions >= cfg.max_subdivisions) {
      out.converged = false;
      break;
    }
    detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::evaluate_panel(batch, worst.a, mid);
    auto right = detail::evaluate_panel(batch, mid, worst.b);
    out.evaluations += 2 * detail::kKronrodPoints;
    ++out.subdivisions;
    total += left.value + right.value - worst.value;
    rule_err += left.rule_error + right.rule_error - worst.rule_error;
    inner_err += left.inner_error + right.inner_error - worst.inner_error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the panels to shed the accumulated update round-off.
  total = 0.0;
  rule_err = 0.0;
  inner_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    rule_err += heap.top().rule_error;
    inner_err += heap.top().inner_error;
    heap.pop();
  }
  out.value = total;
  out.error = rule_err + inner_err;
  return out;
}

/// Nested quadrature of f over lower <= t1 <= ... <= t_dim <= upper, dim in {1, 2, 3}.
///
/// f is either pointwise, `double(std::span<const double> times)`, or batched
/// over the innermost time, `void(std::span<const double> outer,
/// std::span<const double> inner, std::span<double> out)`. Each inner level
/// runs with a 10x tighter tolerance and reports its error estimate upward.
template <class F>
QuadratureResult integrate_simplex(F&& f, int dim, double upper, const QuadratureConfig& cfg = {},
                                   std::span<const double> breakpoints = {}, double lower = 0.0) {
  cfg.validate();
  if (dim < 1 || dim > 3) throw std::invalid_argument("integrate_simplex: dimension must be 1, 2 or 3");
  if (!(upper >= lower)) throw std::invalid_argument("integrate_simplex: requires upper >= lower");

  using CD = std::span<const double>;
  using D = std::span<double>;
  auto inner_batch = [&f](CD outer, CD x, D out) {
    if constexpr (std::is_invocable_v<F&, CD, CD, D>) {
      f(outer, x, out);
    } else {
      std::array<double, 4> t{};
      std::copy(outer.begin(), outer.end(), t.begin());
      for (std::size_t i = 0; i < x.size(); ++i) {
        t[outer.size()] = x[i];
        out[i] = f(CD(t.data(), outer.size() + 1));
      }
    }
  };

  std::array<double, 3> prefix{};
  bool all_converged = true;
  std::size_t evaluations = 0;

  // level k integrates t_{k+1} over [prefix[k-1] (or lower), upper]
  auto level = [&](auto& self, int k, double lo, const QuadratureConfig& c) -> QuadratureResult {
    if (k == dim - 1) {
      auto g = [&](CD x, D v) { inner_batch(CD(prefix.data(), static_cast<std::size_t>(k)), x, v); };
      auto r = integrate_1d(g, lo, upper, c, breakpoints);
      evaluations += r.evaluations;
      if (!r.converged) all_converged = false;
      return r;
    }
    const QuadratureConfig inner_cfg = c.tightened();
    auto g = [&](double x) -> Estimate {
      prefix[static_cast<std::size_t>(k)] = x;
      auto r = self(self, k + 1, x, inner_cfg);
      return {r.value, r.error};
    };
    auto r = integrate_1d(g, lo, upper, c, breakpoints);
    if (!r.converged) all_converged = false;
    return r;
  };

  QuadratureResult r = level(level, 0, lower, cfg);
  r.evaluations = evaluations;
  r.converged = r.converged && all_converged;
  return r;
}

}  // namespace pulsedtls::numerics
