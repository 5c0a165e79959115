#include <cmath>
#include <stdexcept>

#include "pulsedtls/numerics/parallel.hpp"
#include "pulsedtls/oracle.hpp"

namespace pulsedtls::oracle {

namespace {

constexpr double kJumpTimeTol = 1e-8;  // in units of 1/gamma

TrajectoryRecord run_one(const ConditionalPropagator& u, numerics::RandomStream rng, double horizon,
                         const TwoLevelState& initial) {
  TrajectoryRecord rec;
  rec.seed = rng.seed();
  const double W = u.pulse().window_end();
  const double gamma = u.gamma();
  TwoLevelState psi = initial;
  const double n0 = psi.norm2();
  psi.amp_g /= std::sqrt(n0);
  psi.amp_e /= std::sqrt(n0);
  double t = 0.0;

  auto finish = [&](const TwoLevelState& s, double from) {
    TwoLevelState end = u.apply(s, from, std::max(from, horizon));
    const double n = end.norm2();
    if (n > 0.0) {
      end.amp_g /= std::sqrt(n);
      end.amp_e /= std::sqrt(n);
    }
    rec.final_state = end;
    rec.count = static_cast<int>(rec.emission_times.size());
    return rec;
  };

  if (gamma == 0.0) return finish(psi, t);

  while (t < horizon) {
    const double threshold = rng.uniform_open();
    double jump = -1.0;
    if (t < W) {
      const double end = std::min(W, horizon);
      if (u.apply(psi, t, end).norm2() <= threshold) {
        double lo = t;
        double hi = end;
        while (hi - lo > kJumpTimeTol / gamma) {
          const double mid = 0.5 * (lo + hi);
          if (u.apply(psi, t, mid).norm2() > threshold)
            lo = mid;
          else
            hi = mid;
        }
        jump = 0.5 * (lo + hi);
      }
    }
    if (jump < 0.0) {
      // No jump inside the pulse: after it the ground amplitude is frozen and
      // the excited amplitude decays, so the jump time is explicit.
      if (horizon <= W) return finish(psi, t);
      const double start = std::max(t, W);
      const TwoLevelState s = u.apply(psi, t, start);
      const double g2 = std::norm(s.amp_g);
      const double e2 = std::norm(s.amp_e);
      if (threshold <= g2 || e2 <= 0.0) return finish(psi, t);
      jump = start - std::log((threshold - g2) / e2) / gamma;
      if (jump > horizon) return finish(psi, t);
    }
    rec.emission_times.push_back(jump);
    psi = TwoLevelState::ground();
    t = jump;
    if (t >= W) return finish(psi, t);
  }
  return finish(psi, t);
}

}  // namespace

double default_horizon(const PulseShape& p, const SystemParams& sys) {
  sys.validate();
  return std::max(p.width(), p.window_end()) + 20.0 / sys.gamma;
}

std::vector<TrajectoryRecord> sample_trajectories(const ConditionalPropagator& u, std::size_t n_traj,
                                                  const numerics::RandomStream& stream, double t_horizon,
                                                  const TwoLevelState& initial, unsigned workers) {
  if (n_traj < 1) throw std::invalid_argument("sample_trajectories needs n_traj >= 1");
  if (!(t_horizon >= 0.0) || !std::isfinite(t_horizon)) throw std::invalid_argument("horizon must be finite and >= 0");
  if (!(initial.norm2() > 0.0)) throw std::invalid_argument("initial state must have nonzero norm");
  std::vector<TrajectoryRecord> out(n_traj);
  numerics::parallel_for(
      n_traj, [&](std::size_t i) { out[i] = run_one(u, stream.substream(i), t_horizon, initial); }, workers);
  return out;
}

std::vector<TrajectoryRecord> sample_trajectories(const PulseShape& p, const SystemParams& sys, std::size_t n_traj,
                                                  const numerics::RandomStream& stream, double t_horizon,
                                                  const TwoLevelState& initial, unsigned workers) {
  const ConditionalPropagator u(p, sys);
  return sample_trajectories(u, n_traj, stream, t_horizon, initial, workers);
}

PhotocountDistribution histogram_distribution(std::span<const TrajectoryRecord> records, int nmax) {
  if (records.empty()) throw std::invalid_argument("histogram_distribution needs at least one trajectory");
  if (nmax < 1) throw std::invalid_argument("nmax must be >= 1");
  const auto n = static_cast<double>(records.size());
  std::vector<double> counts(static_cast<std::size_t>(nmax) + 2, 0.0);
  for (const auto& r : records) counts[static_cast<std::size_t>(std::min(r.count, nmax + 1))] += 1.0;
  PhotocountDistribution d;
  d.provenance = Provenance::MonteCarlo;
  for (int k = 0; k <= nmax; ++k) {
    const double pk = counts[static_cast<std::size_t>(k)] / n;
    d.exclusive.push_back(pk);
    d.standard_error.push_back(std::sqrt(pk * (1.0 - pk) / n));
  }
  d.truncation_bound = counts.back() / n;
  double tail = d.truncation_bound;
  d.inclusive.assign(static_cast<std::size_t>(nmax), 0.0);
  for (int k = nmax; k >= 1; --k) {
    tail += d.exclusive[static_cast<std::size_t>(k)];
    d.inclusive[static_cast<std::size_t>(k - 1)] = tail;
  }
  return d;
}

}  // namespace pulsedtls::oracle
