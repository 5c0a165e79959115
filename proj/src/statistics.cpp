#include "pulsedtls/statistics.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsedtls::stats {

namespace {

double require_mean(const PhotocountDistribution& d) {
  const double m = expected_n(d);
  if (!(m > 0.0)) throw std::domain_error("statistic undefined for E[n] = 0");
  return m;
}

}  // namespace

double expected_n(const PhotocountDistribution& d) {
  double m = 0.0;
  for (int k = 1; k <= d.nmax(); ++k) m += k * d.P(k);
  return m;
}

double g2_zero(const PhotocountDistribution& d) {
  const double m = require_mean(d);
  double pairs = 0.0;
  for (int k = 2; k <= d.nmax(); ++k) pairs += k * (k - 1) * d.P(k);
  return pairs / (m * m);
}

double g2_zero_short_pulse(double P1, double P2) {
  const double m = P1 + 2.0 * P2;
  if (!(m > 0.0)) throw std::domain_error("g2_zero_short_pulse requires P1 + 2 P2 > 0");
  return 2.0 * P2 / (m * m);
}

double variance_rel(const PhotocountDistribution& d) {
  const double m = require_mean(d);
  double acc = 0.0;
  for (int k = 0; k <= d.nmax(); ++k) acc += (static_cast<double>(k) * k - m * m) * d.P(k);
  return acc / m;
}

std::vector<double> purities(const PhotocountDistribution& d) {
  double emitted = 0.0;
  for (int k = 1; k <= d.nmax(); ++k) emitted += d.P(k);
  if (!(emitted > 0.0)) throw std::domain_error("purities undefined for an all-vacuum distribution");
  std::vector<double> out;
  for (int k = 1; k <= d.nmax(); ++k) out.push_back(d.P(k) / emitted);
  return out;
}

double g2_from_moments(double mean, double factorial2) {
  if (!(mean > 0.0)) throw std::domain_error("statistic undefined for E[n] = 0");
  return factorial2 / (mean * mean);
}

double variance_rel_from_moments(double mean, double factorial2) {
  if (!(mean > 0.0)) throw std::domain_error("statistic undefined for E[n] = 0");
  // E[n²] = E[n(n−1)] + E[n]
  return (factorial2 + mean - mean * mean) / mean;
}

EmissionStatistics summarize(const PhotocountDistribution& d) {
  EmissionStatistics s;
  s.mean_n = require_mean(d);
  s.g2_zero = g2_zero(d);
  s.var_rel = variance_rel(d);
  s.purities = purities(d);
  const double slack = d.nmax() * d.truncation_bound;
  for (double v : {s.mean_n, s.g2_zero, std::abs(s.var_rel)})
    if (slack > 0.01 * v) s.truncation_sensitive = true;
  return s;
}

}  // namespace pulsedtls::stats
