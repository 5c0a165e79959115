#pragma once

#include <stdexcept>
#include <string_view>
#include <vector>

namespace pulsedtls {

/// Spontaneous decay rate. gamma = 0 is accepted only where the operation says so.
struct SystemParams {
  double gamma = 1.0;

  void validate(bool allow_zero = false) const;
};

enum class Provenance { AnalyticShortPulse, ClosedFormSquare, ExactOracle, MonteCarlo };

std::string_view to_string(Provenance p);

/// Raised when a computed distribution violates its invariants by more than
/// the accepted numerical slack.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Photocount distribution truncated at nmax() photons.
///
/// inclusive[k] holds F_{k+1} (probability of k+1 or more emissions) for
/// k < nmax(); exclusive[n] holds P_n for n = 0..nmax(). truncation_bound is
/// F_{nmax+1}, an upper bound on the omitted tail.
struct PhotocountDistribution {
  std::vector<double> inclusive;
  std::vector<double> exclusive;
  double truncation_bound = 0.0;
  /// Propagated absolute error estimate of the inclusive probabilities.
  double quad_error = 0.0;
  /// Monte Carlo standard errors of exclusive[n]; empty for deterministic backends.
  std::vector<double> standard_error;
  Provenance provenance = Provenance::AnalyticShortPulse;

  int nmax() const { return static_cast<int>(exclusive.size()) - 1; }
  double P(int n) const { return n >= 0 && n <= nmax() ? exclusive[static_cast<std::size_t>(n)] : 0.0; }
  double F(int n) const;
  /// Accepted negativity of P_n and normalization slack.
  double epsilon() const { return 10.0 * quad_error + 1e-12; }

  /// Builds P_0..P_nmax from F_1..F_{nmax+1}; the last entry becomes the bound.
  static PhotocountDistribution from_inclusive(std::vector<double> f, double quad_error, Provenance provenance);

  /// Throws NumericalError when nesting, sign or normalization fail beyond epsilon().
  void validate() const;
};

}  // namespace pulsedtls
