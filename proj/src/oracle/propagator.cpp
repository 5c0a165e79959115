#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "common.hpp"
#include "pulsedtls/oracle.hpp"

namespace pulsedtls::oracle {

namespace {

// One RK4 step of dU/dt = G(t) U gives relative error ~ (h·rate)^5 / 120.
constexpr double kNodeRateStep = 0.02;
constexpr std::size_t kMaxNodes = 4'000'000;

}  // namespace

OdeConfig oracle_ode_config() {
  OdeConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  return cfg;
}

TwoLevelState propagate_conditional(const PulseShape& p, const SystemParams& sys, const TwoLevelState& state,
                                    double t_a, double t_b, const OdeConfig& cfg) {
  sys.validate(true);
  if (!(t_a >= 0.0) || !(t_b >= t_a) || !std::isfinite(t_b))
    throw std::invalid_argument("propagate_conditional requires 0 <= t_a <= t_b");
  // (Re g, Re e, Im g, Im e)
  const numerics::State<4> y0 = {state.amp_g.real(), state.amp_e.real(), state.amp_g.imag(), state.amp_e.imag()};
  const double gamma = sys.gamma;
  auto rhs = [&](double t, const numerics::State<4>& y, numerics::State<4>& dy) {
    const double h = 0.5 * p.envelope(t);
    dy[0] = -h * y[1];
    dy[1] = h * y[0] - 0.5 * gamma * y[1];
    dy[2] = -h * y[3];
    dy[3] = h * y[2] - 0.5 * gamma * y[3];
  };
  const double W = p.window_end();
  const double inner_end = std::min(t_b, std::max(t_a, W));
  const std::array<double, 2> times = {t_a, inner_end};
  auto bps = detail::pulse_breakpoints(p);
  auto ys = numerics::integrate_ode<4>(rhs, y0, times, cfg, bps);
  numerics::State<4> y = ys.back();
  if (t_b > inner_end) {
    const double k = std::exp(-0.5 * gamma * (t_b - inner_end));
    y[1] *= k;
    y[3] *= k;
  }
  return {{y[0], y[2]}, {y[1], y[3]}};
}

ConditionalPropagator::ConditionalPropagator(const PulseShape& p, const SystemParams& sys, const OdeConfig& cfg)
    : pulse_(p), gamma_(sys.gamma) {
  sys.validate(true);
  const double W = p.window_end();
  const double rate = std::max(detail::peak_envelope(p), gamma_);
  const double h = std::min(W / 64.0, rate > 0.0 ? kNodeRateStep / rate : W);
  const auto n_nodes = static_cast<std::size_t>(std::ceil(W / h));
  if (n_nodes > kMaxNodes) throw std::invalid_argument("pulse too long or too strong for the propagator table");

  const double block_len = gamma_ > 0.0 ? 2.0 / gamma_ : W;
  const auto n_blocks = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(W / block_len - 1e-12)));
  anchors_.resize(n_blocks + 1);
  for (std::size_t j = 0; j <= n_blocks; ++j) anchors_[j] = W * static_cast<double>(j) / static_cast<double>(n_blocks);
  anchors_.back() = W;

  const auto bps = detail::pulse_breakpoints(p);
  auto rhs = [this](double t, const numerics::State<4>& y, numerics::State<4>& dy) {
    detail::mat2_rhs(pulse_, gamma_, t, y, dy);
  };
  blocks_.resize(n_blocks);
  for (std::size_t j = 0; j < n_blocks; ++j) {
    const double a = anchors_[j];
    const double b = anchors_[j + 1];
    const auto per = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((b - a) / h)));
    std::vector<double> t;
    t.reserve(per + 1);
    for (std::size_t i = 0; i <= per; ++i) t.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(per));
    t.back() = b;
    for (double x : bps)
      if (x > a && x < b) t.push_back(x);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    auto ys = numerics::integrate_ode<4>(rhs, detail::kIdentity2, t, cfg, bps);
    blocks_[j].t = std::move(t);
    blocks_[j].u.assign(ys.begin(), ys.end());
  }
}

std::size_t ConditionalPropagator::node_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.t.size();
  return n;
}

std::size_t ConditionalPropagator::block_of(double t) const {
  const auto it = std::upper_bound(anchors_.begin(), anchors_.end(), t);
  const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - anchors_.begin()) - 1));
  return std::min(j, blocks_.size() - 1);
}

Mat2 ConditionalPropagator::within(const Block& b, double t) const {
  auto it = std::upper_bound(b.t.begin(), b.t.end(), t);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - b.t.begin()) - 1));
  i = std::min(i, b.t.size() - 1);
  const double dt = t - b.t[i];
  if (dt <= 0.0) return b.u[i];
  auto rhs = [this](double s, const numerics::State<4>& y, numerics::State<4>& dy) {
    detail::mat2_rhs(pulse_, gamma_, s, y, dy);
  };
  return numerics::rk4_step<4>(rhs, b.t[i], b.u[i], dt);
}

Mat2 ConditionalPropagator::inside(double t, double s) const {
  const std::size_t bs = block_of(s);
  const std::size_t bt = block_of(t);
  const Mat2 us = within(blocks_[bs], s);
  const Mat2 ut = within(blocks_[bt], t);
  if (bs == bt) return detail::mul(ut, detail::inverse(us));
  Mat2 acc = detail::mul(blocks_[bs].u.back(), detail::inverse(us));
  for (std::size_t j = bs + 1; j < bt; ++j) acc = detail::mul(blocks_[j].u.back(), acc);
  return detail::mul(ut, acc);
}

Mat2 ConditionalPropagator::between(double t, double s) const {
  if (!(s >= 0.0) || !(t >= s)) throw std::invalid_argument("propagator requires 0 <= s <= t");
  const double W = pulse_.window_end();
  if (s >= W) return {1.0, 0.0, 0.0, std::exp(-0.5 * gamma_ * (t - s))};
  const Mat2 m = inside(std::min(t, W), s);
  if (t <= W) return m;
  const double k = std::exp(-0.5 * gamma_ * (t - W));
  return {m[0], m[1], k * m[2], k * m[3]};
}

TwoLevelState ConditionalPropagator::apply(const TwoLevelState& state, double t_a, double t_b) const {
  const Mat2 m = between(t_b, t_a);
  return {m[0] * state.amp_g + m[1] * state.amp_e, m[2] * state.amp_g + m[3] * state.amp_e};
}

}  // namespace pulsedtls::oracle
