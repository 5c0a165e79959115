#pragma once

#include <algorithm>
#include <vector>

#include "pulsedtls/numerics/ode.hpp"
#include "pulsedtls/pulse.hpp"
#include "pulsedtls/simd/kernels.hpp"

namespace pulsedtls::oracle::detail {

using simd::Mat2;
using simd::Mat4;

inline constexpr Mat2 kIdentity2 = {1.0, 0.0, 0.0, 1.0};

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 inverse(const Mat2& m) {
  const double det = m[0] * m[3] - m[1] * m[2];
  return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

/// Interior kinks plus the support end, where the envelope may jump.
inline std::vector<double> pulse_breakpoints(const PulseShape& p) {
  auto b = p.breakpoints();
  b.push_back(p.window_end());
  std::sort(b.begin(), b.end());
  return b;
}

inline double peak_envelope(const PulseShape& p) {
  switch (p.kind()) {
    case PulseKind::Square:
      return p.total_area() / p.width();
    case PulseKind::Gaussian:
      return p.envelope(p.center());
    case PulseKind::Tabulated: {
      double m = 0.0;
      for (const auto& s : p.samples()) m = std::max(m, s.omega);
      return m;
    }
  }
  return 0.0;
}

/// dU/dt = G(t) U for the no-jump generator G = [[0, −Ω/2], [Ω/2, −γ/2]], U row-major.
inline void mat2_rhs(const PulseShape& p, double gamma, double t, const numerics::State<4>& u,
                     numerics::State<4>& du) {
  const double h = 0.5 * p.envelope(t);
  du[0] = -h * u[2];
  du[1] = -h * u[3];
  du[2] = h * u[0] - 0.5 * gamma * u[2];
  du[3] = h * u[1] - 0.5 * gamma * u[3];
}

/// Lindblad right-hand side on (ρ_gg, ρ_ee, Re ρ_ge, Im ρ_ge).
inline void lindblad_rhs(double omega, double gamma, const double* r, double* dr) {
  dr[0] = -omega * r[2] + gamma * r[1];
  dr[1] = omega * r[2] - gamma * r[1];
  dr[2] = 0.5 * omega * (r[0] - r[1]) - 0.5 * gamma * r[2];
  dr[3] = -0.5 * gamma * r[3];
}

/// No-jump part of the Lindblad generator (the jump term γρ_ee → ρ_gg removed).
inline void no_jump_rhs(double omega, double gamma, const double* r, double* dr) {
  dr[0] = -omega * r[2];
  dr[1] = omega * r[2] - gamma * r[1];
  dr[2] = 0.5 * omega * (r[0] - r[1]) - 0.5 * gamma * r[2];
  dr[3] = -0.5 * gamma * r[3];
}

}  // namespace pulsedtls::oracle::detail
