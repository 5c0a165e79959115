#include "pulsedtls/distribution.hpp"

#include <cmath>
#include <string>

namespace pulsedtls {

void SystemParams::validate(bool allow_zero) const {
  if (!std::isfinite(gamma) || gamma < 0.0 || (gamma == 0.0 && !allow_zero))
    throw std::invalid_argument(allow_zero ? "gamma must be finite and >= 0" : "gamma must be finite and > 0");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::AnalyticShortPulse:
      return "analytic-short-pulse";
    case Provenance::ClosedFormSquare:
      return "closed-form-square";
    case Provenance::ExactOracle:
      return "exact-oracle";
    case Provenance::MonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

double PhotocountDistribution::F(int n) const {
  if (n <= 0) return 1.0;
  if (n <= nmax()) return inclusive[static_cast<std::size_t>(n - 1)];
  if (n == nmax() + 1) return truncation_bound;
  return 0.0;
}

PhotocountDistribution PhotocountDistribution::from_inclusive(std::vector<double> f, double quad_error,
                                                              Provenance provenance) {
  if (f.size() < 2) throw std::invalid_argument("from_inclusive needs F_1..F_{nmax+1} with nmax >= 1");
  PhotocountDistribution d;
  d.provenance = provenance;
  d.quad_error = quad_error;
  d.truncation_bound = f.back();
  f.pop_back();
  d.exclusive.resize(f.size() + 1);
  d.exclusive[0] = 1.0 - f[0];
  for (std::size_t n = 1; n <= f.size(); ++n) {
    const double next = n < f.size() ? f[n] : d.truncation_bound;
    d.exclusive[n] = f[n - 1] - next;
  }
  d.inclusive = std::move(f);
  return d;
}

void PhotocountDistribution::validate() const {
  const double eps = epsilon();
  if (exclusive.size() < 2 || inclusive.size() + 1 != exclusive.size())
    throw NumericalError("photocount distribution has inconsistent sizes");
  double prev = 1.0;
  for (int n = 1; n <= nmax() + 1; ++n) {
    const double f = F(n);
    if (!std::isfinite(f) || f < -eps || f > prev + eps)
      throw NumericalError("inclusive probabilities are not nested at n = " + std::to_string(n));
    prev = f;
  }
  double sum = 0.0;
  for (int n = 0; n <= nmax(); ++n) {
    if (P(n) < -eps) throw NumericalError("negative exclusive probability at n = " + std::to_string(n));
    sum += P(n);
  }
  if (sum + truncation_bound < 1.0 - eps || sum > 1.0 + eps)
    throw NumericalError("photocount distribution is not normalized");
}

}  // namespace pulsedtls
