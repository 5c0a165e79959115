#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace pulsedtls {

enum class PulseKind { Square, Gaussian, Tabulated };

std::string_view to_string(PulseKind kind);

/// One (time, envelope-rate) node of a tabulated pulse.
struct PulseSample {
  double t;
  double omega;
};

/// Ratio T/σ between the nominal Gaussian width T and the temporal standard
/// deviation of the field envelope. 2√ln2 makes T the FWHM of |Ω(t)|², and
/// reproduces the short-pulse two-photon coefficient 0.2188·γT for a π pulse
/// (see tests/test_gaussian_calibration.cpp for the calibration).
inline constexpr double kGaussianWidthRatio = 1.6651092223153954;

/// Half-extent of the truncated Gaussian in units of σ: the omitted two-sided
/// tail carries about 5.6e-10 of the area (below the 1e-9 budget).
inline constexpr double kGaussianHalfExtent = 6.2;

/// Real, non-negative drive envelope Ω(t) and its running area A(t).
///
/// Every pulse starts interacting at t = 0 and has compact support [0, window_end()].
/// Immutable once built; all member functions are thread-safe.
class PulseShape {
 public:
  static PulseShape square(double total_area, double width);
  static PulseShape gaussian(double total_area, double width);
  /// Piecewise-linear envelope through the samples. Area is integrated exactly.
  static PulseShape tabulated(std::vector<PulseSample> samples);

  PulseKind kind() const { return kind_; }
  double total_area() const { return total_area_; }
  double width() const { return width_; }
  /// Gaussian peak position; 0 for other kinds.
  double center() const { return center_; }
  double sigma() const { return sigma_; }
  /// End of the support; Ω(t) = 0 for t > window_end().
  double window_end() const { return window_end_; }
  std::span<const PulseSample> samples() const { return samples_; }

  double envelope(double t) const;
  double cumulative_area(double t) const;
  void cumulative_area(std::span<const double> t, std::span<double> out) const;
  /// Smallest t with A(t) >= a, by bisection to 1e-10·width.
  double inverse_area(double a) const;

  /// Interior points where Ω is not smooth (tabulated nodes, square edges).
  std::vector<double> breakpoints() const;

  PulseShape with_area(double total_area) const;
  PulseShape with_width(double width) const;

 private:
  PulseShape() = default;

  PulseKind kind_ = PulseKind::Square;
  double total_area_ = 0.0;
  double width_ = 1.0;
  double center_ = 0.0;
  double sigma_ = 0.0;
  double window_end_ = 1.0;
  // Gaussian: renormalization of the truncated profile.
  double gauss_norm_ = 1.0;
  double gauss_tail_ = 0.0;
  std::vector<PulseSample> samples_;
  std::vector<double> prefix_area_;
};

enum class TimeUnit { InverseGamma, Seconds };

/// Reads a two-column `t,omega` CSV. With TimeUnit::Seconds, times are
/// multiplied by gamma and rates divided by it.
PulseShape load_tabulated_csv(const std::filesystem::path& path, TimeUnit unit = TimeUnit::InverseGamma,
                              double gamma_per_second = 1.0);

}  // namespace pulsedtls
