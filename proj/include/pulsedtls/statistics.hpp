#pragma once

#include <vector>

#include "pulsedtls/distribution.hpp"

namespace pulsedtls::stats {

/// E[n] = Σ k P_k over the available k.
double expected_n(const PhotocountDistribution& d);

/// g²[0] = Σ k(k−1) P_k / E[n]². Throws std::domain_error when E[n] = 0.
double g2_zero(const PhotocountDistribution& d);

/// Two-photon approximation 2 P_2 / (P_1 + 2 P_2)².
double g2_zero_short_pulse(double P1, double P2);

/// Σ (k² − E[n]²) P_k / E[n]. Throws std::domain_error when E[n] = 0.
double variance_rel(const PhotocountDistribution& d);

/// P_n / Σ_{m>0} P_m for n = 1..nmax. Throws std::domain_error for an all-vacuum distribution.
std::vector<double> purities(const PhotocountDistribution& d);

/// Same statistics from untruncated moments E[n] and E[n(n−1)].
double g2_from_moments(double mean, double factorial2);
double variance_rel_from_moments(double mean, double factorial2);

struct EmissionStatistics {
  double mean_n = 0.0;
  double g2_zero = 0.0;
  double var_rel = 0.0;
  std::vector<double> purities;
  /// nmax·truncation_bound exceeds 1% of one of the statistics.
  bool truncation_sensitive = false;
};

EmissionStatistics summarize(const PhotocountDistribution& d);

}  // namespace pulsedtls::stats
