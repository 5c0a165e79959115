#include <array>
#include <cmath>
#include <stdexcept>

#include "common.hpp"
#include "pulsedtls/oracle.hpp"

namespace pulsedtls::oracle {

namespace {

void check_times(std::span<const double> times) {
  if (times.empty() || times.size() > 4) throw std::invalid_argument("exact density supports 1 <= n <= 4");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0)
      throw std::invalid_argument("emission times must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("emission times must be strictly increasing");
  }
}

}  // namespace

double exact_density_fn(const PulseShape& p, const SystemParams& sys, std::span<const double> times) {
  sys.validate();
  check_times(times);
  double value = 1.0;
  double t_prev = 0.0;
  for (double t : times) {
    const TwoLevelState s = propagate_conditional(p, sys, TwoLevelState::ground(), t_prev, t);
    value *= sys.gamma * std::norm(s.amp_e);
    t_prev = t;
  }
  return value;
}

double exact_density_fn(const ConditionalPropagator& u, std::span<const double> times) {
  SystemParams{u.gamma()}.validate();
  check_times(times);
  double value = 1.0;
  double t_prev = 0.0;
  for (double t : times) {
    const double e = u.between(t, t_prev)[2];
    value *= u.gamma() * e * e;
    t_prev = t;
  }
  return value;
}

Estimate exact_Fn(const ConditionalPropagator& u, int n, const QuadratureConfig& cfg) {
  if (n < 1 || n > 4) throw std::invalid_argument("exact_Fn supports 1 <= n <= 4");
  SystemParams{u.gamma()}.validate();
  const double W = u.pulse().window_end();
  const double gamma = u.gamma();
  // Probability of at least one more emission after a reset to |g> at s.
  auto remaining = [&](double s) {
    const double g = u.between(W, s)[0];
    return (1.0 - g) * (1.0 + g);
  };
  if (n == 1) return {remaining(0.0), 0.0};

  auto f = [&](std::span<const double> outer, std::span<const double> x, std::span<double> out) {
    double prefix = 1.0;
    double t_prev = 0.0;
    for (double t : outer) {
      const double e = u.between(t, t_prev)[2];
      prefix *= gamma * e * e;
      t_prev = t;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = u.between(x[i], t_prev)[2];
      out[i] = prefix * gamma * e * e * remaining(x[i]);
    }
  };
  const auto bps = u.pulse().breakpoints();
  auto r = numerics::require_converged(numerics::integrate_simplex(f, n - 1, W, cfg, bps), "exact F_n quadrature");
  return {r.value, r.error};
}

PhotocountDistribution exact_distribution(const PulseShape& p, const SystemParams& sys, int nmax,
                                          const QuadratureConfig& cfg) {
  if (nmax < 1 || nmax > 3) throw std::invalid_argument("exact_distribution supports 1 <= nmax <= 3");
  sys.validate();
  const ConditionalPropagator u(p, sys);
  std::vector<double> f;
  double err = 0.0;
  for (int n = 1; n <= nmax + 1; ++n) {
    const Estimate e = exact_Fn(u, n, cfg);
    f.push_back(e.value);
    err += e.error;
  }
  auto d = PhotocountDistribution::from_inclusive(std::move(f), err, Provenance::ExactOracle);
  d.validate();
  return d;
}

}  // namespace pulsedtls::oracle
