#include "pulsedtls/cli/scan.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pulsedtls/analytic.hpp"
#include "pulsedtls/numerics/parallel.hpp"
#include "pulsedtls/oracle.hpp"
#include "pulsedtls/statistics.hpp"

namespace pulsedtls::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNmax = 3;
constexpr int kMaxCorrelationGrid = 256;

const SystemParams kSystem{1.0};

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

numerics::QuadratureConfig quad_config(const ScanSpec& spec) {
  return {spec.tol, spec.tol * 1e-4, 1 << 15};
}

// Moments of the emission count over a trajectory ensemble.
struct EnsembleMoments {
  double mean = 0.0;
  double factorial2 = 0.0;
  double second = 0.0;
};

EnsembleMoments ensemble_moments(const std::vector<oracle::TrajectoryRecord>& recs) {
  EnsembleMoments m;
  for (const auto& r : recs) {
    const double k = r.count;
    m.mean += k;
    m.factorial2 += k * (k - 1.0);
    m.second += k * k;
  }
  const auto n = static_cast<double>(recs.size());
  m.mean /= n;
  m.factorial2 /= n;
  m.second /= n;
  return m;
}

std::vector<oracle::TrajectoryRecord> run_ensemble(const ScanSpec& spec, const PulseShape& p, std::size_t row) {
  const numerics::RandomStream parent = numerics::RandomStream(spec.seed).substream(row);
  return oracle::sample_trajectories(p, kSystem, spec.trajectories, parent, oracle::default_horizon(p, kSystem),
                                     oracle::TwoLevelState::ground(), 1);
}

Cell defined(const std::function<double()>& f) {
  try {
    return f();
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

// Runs body(row) for every row in parallel, turning exceptions into failures.
struct RowRunner {
  std::vector<std::vector<PointFailure>> failures;

  explicit RowRunner(std::size_t n) : failures(n) {}

  void guard(std::size_t row, const std::string& backend, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      failures[row].push_back({row, backend, e.what()});
    }
  }

  void collect(Dataset& d) const {
    for (const auto& v : failures) d.failures.insert(d.failures.end(), v.begin(), v.end());
  }
};

std::vector<Backend> requested(const ScanSpec& spec) {
  std::vector<Backend> out;
  for (Backend b : {Backend::Analytic, Backend::Exact, Backend::MonteCarlo})
    if (spec.uses(b)) out.push_back(b);
  return out;
}

Dataset scan_width(const ScanSpec& spec) {
  const auto gts = spec.gammaT.values();
  const double area = spec.area.min * kPi;
  const bool mc = spec.uses(Backend::MonteCarlo);
  Table t;
  t.header = {"gammaT", "P1_analytic", "P2_analytic", "P1_exact", "P2_exact", "g2_analytic", "g2_exact", "err_est"};
  if (mc) t.header.insert(t.header.end(), {"P1_mc", "P2_mc", "g2_mc"});
  t.rows.assign(gts.size(), std::vector<Cell>(t.header.size()));
  std::vector<double> err(gts.size(), 0.0);
  RowRunner runner(gts.size());
  numerics::parallel_for(gts.size(), [&](std::size_t i) {
    auto& row = t.rows[i];
    row[0] = gts[i];
    const PulseShape p = make_pulse(spec, area, gts[i]);
    if (spec.uses(Backend::Analytic))
      runner.guard(i, "analytic", [&] {
        const auto d = analytic::exclusive_Pn(p, kSystem, kNmax, quad_config(spec));
        row[1] = d.P(1);
        row[2] = d.P(2);
        row[5] = defined([&] { return stats::g2_zero(d); });
        err[i] += d.quad_error;
      });
    if (spec.uses(Backend::Exact))
      runner.guard(i, "exact", [&] {
        const auto d = oracle::exact_distribution(p, kSystem, kNmax, quad_config(spec));
        const auto m = oracle::exact_moments(p, kSystem);
        row[3] = d.P(1);
        row[4] = d.P(2);
        row[6] = defined([&] { return stats::g2_from_moments(m.mean, m.factorial2); });
        err[i] += d.quad_error;
      });
    row[7] = err[i];
    if (mc)
      runner.guard(i, "monte-carlo", [&] {
        const auto recs = run_ensemble(spec, p, i);
        const auto d = oracle::histogram_distribution(recs, kNmax);
        const auto m = ensemble_moments(recs);
        row[8] = d.P(1);
        row[9] = d.P(2);
        row[10] = defined([&] { return stats::g2_from_moments(m.mean, m.factorial2); });
      });
  });
  Dataset out;
  out.tables.push_back(std::move(t));
  out.error_estimates = std::move(err);
  runner.collect(out);
  return out;
}

Dataset scan_area(const ScanSpec& spec) {
  const auto areas = spec.area.values();
  const double gt = spec.gammaT.min;
  const auto backends = requested(spec);
  const std::size_t nb = backends.size();
  Table t;
  t.header = {"area", "P1_ideal", "P1", "P2", "En", "g2", "var_rel", "backend"};
  t.rows.assign(areas.size() * nb, std::vector<Cell>(7));
  t.labels.resize(areas.size() * nb);
  std::vector<double> err(t.rows.size(), 0.0);
  RowRunner runner(t.rows.size());
  numerics::parallel_for(t.rows.size(), [&](std::size_t r) {
    const std::size_t i = r / nb;
    const Backend b = backends[r % nb];
    auto& row = t.rows[r];
    t.labels[r] = to_string(b);
    const double area = areas[i] * kPi;
    row[0] = areas[i];
    row[1] = analytic::ideal_excited_prob(area);
    runner.guard(r, to_string(b), [&] {
      const PulseShape p = make_pulse(spec, area, gt);
      if (b == Backend::Analytic) {
        const auto d = analytic::exclusive_Pn(p, kSystem, kNmax, quad_config(spec));
        row[2] = d.P(1);
        row[3] = d.P(2);
        row[4] = stats::expected_n(d);
        row[5] = defined([&] { return stats::g2_zero(d); });
        row[6] = defined([&] { return stats::variance_rel(d); });
        err[r] = d.quad_error;
      } else if (b == Backend::Exact) {
        const auto d = oracle::exact_distribution(p, kSystem, kNmax, quad_config(spec));
        const auto m = oracle::exact_moments(p, kSystem);
        row[2] = d.P(1);
        row[3] = d.P(2);
        row[4] = m.mean;
        row[5] = defined([&] { return stats::g2_from_moments(m.mean, m.factorial2); });
        row[6] = defined([&] { return stats::variance_rel_from_moments(m.mean, m.factorial2); });
        err[r] = d.quad_error;
      } else {
        const auto recs = run_ensemble(spec, p, r);
        const auto d = oracle::histogram_distribution(recs, kNmax);
        const auto m = ensemble_moments(recs);
        row[2] = d.P(1);
        row[3] = d.P(2);
        row[4] = m.mean;
        row[5] = defined([&] { return stats::g2_from_moments(m.mean, m.factorial2); });
        row[6] = defined([&] { return stats::variance_rel_from_moments(m.mean, m.factorial2); });
      }
    });
  });
  Dataset out;
  out.tables.push_back(std::move(t));
  out.error_estimates = std::move(err);
  runner.collect(out);
  return out;
}

Dataset densities(const ScanSpec& spec) {
  if (spec.backend != Backend::Analytic && spec.backend != Backend::All)
    throw std::invalid_argument("densities are computed by the analytic backend only");
  const double area = spec.area.min * kPi;
  const PulseShape p = make_pulse(spec, area, spec.gammaT.min);
  const auto q = quad_config(spec);
  const auto n = static_cast<std::size_t>(spec.resolution);
  std::vector<double> a(n), t(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = area * static_cast<double>(k) / static_cast<double>(n - 1);
    t[k] = p.inverse_area(std::min(a[k], p.total_area()));
  }

  Table one;
  one.suffix = "_1d";
  one.header = {"A_t1", "Pe_no_jump", "p1", "p2", "p3"};
  one.rows.assign(n, std::vector<Cell>(5));
  std::vector<double> err(n, 0.0);
  RowRunner runner(n);
  numerics::parallel_for(n, [&](std::size_t k) {
    auto& row = one.rows[k];
    row[0] = a[k] / kPi;
    row[1] = analytic::ideal_excited_prob(p.cumulative_area(t[k]));
    runner.guard(k, "analytic", [&] {
      const auto p1 = analytic::marginal_p1(p, kSystem, t[k], q);
      const auto p2 = analytic::marginal_p2(p, kSystem, t[k], q);
      const auto p3 = analytic::marginal_p3(p, kSystem, t[k], q);
      row[2] = p1.value;
      row[3] = p2.value;
      row[4] = p3.value;
      err[k] = p1.error + p2.error + p3.error;
    });
  });

  Table joint;
  joint.suffix = "_p2_joint";
  joint.header = {"A_t1", "A_t2", "p2_joint"};
  Table sym;
  sym.suffix = "_p3_sym";
  sym.header = {"A_t1", "A_t2", "p3_sym"};
  joint.rows.assign(n * n, std::vector<Cell>(3));
  sym.rows.assign(n * n, std::vector<Cell>(3));
  RowRunner runner2(n * n);
  numerics::parallel_for(n * n, [&](std::size_t r) {
    const std::size_t i = r / n;
    const std::size_t j = r % n;
    joint.rows[r][0] = sym.rows[r][0] = a[i] / kPi;
    joint.rows[r][1] = sym.rows[r][1] = a[j] / kPi;
    runner2.guard(r, "analytic", [&] {
      joint.rows[r][2] = t[i] < t[j] ? analytic::density_p2_joint(p, kSystem, t[i], t[j], q).value : 0.0;
      sym.rows[r][2] = analytic::density_p3_sym_pair(p, kSystem, t[i], t[j], q).value;
    });
  });

  Dataset out;
  out.tables = {std::move(one), std::move(joint), std::move(sym)};
  out.error_estimates = std::move(err);
  runner.collect(out);
  runner2.collect(out);
  return out;
}

Dataset g2grid(const ScanSpec& spec) {
  if (spec.backend == Backend::Analytic || spec.backend == Backend::MonteCarlo)
    throw std::invalid_argument("g2grid is computed by the exact backend only");
  if (spec.resolution > kMaxCorrelationGrid)
    throw std::invalid_argument("g2grid resolution is limited to 256 points per axis");
  const PulseShape p = make_pulse(spec, spec.area.min * kPi, spec.gammaT.min);
  const auto n = static_cast<std::size_t>(spec.resolution);
  const auto grid = oracle::correlation_grid(p, kSystem, n - n / 2, n / 2, oracle::default_horizon(p, kSystem));
  const auto c = oracle::g2_two_time(p, kSystem, grid, grid);
  Table t;
  t.header = {"t1", "t2", "G2"};
  double peak = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diag = std::max(diag, std::abs(c.at(i, i)));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      t.rows.push_back({grid[i], grid[j], c.at(i, j)});
      peak = std::max(peak, std::abs(c.at(i, j)));
    }
  }
  Dataset out;
  out.tables.push_back(std::move(t));
  const auto pw = oracle::pulsewise_g2(c);
  const auto m = oracle::exact_moments(p, kSystem);
  out.summary = {{"g2_pulsewise_grid", pw.g2},
                 {"g2_pulsewise_moments", stats::g2_from_moments(m.mean, m.factorial2)},
                 {"mean_n_grid", pw.mean},
                 {"diagonal_over_peak", peak > 0.0 ? diag / peak : 0.0}};
  return out;
}

Dataset distribution(const ScanSpec& spec) {
  const auto gts = spec.gammaT.values();
  const double area = spec.area.min * kPi;
  const auto backends = requested(spec);
  const std::size_t nb = backends.size();
  Table t;
  t.header = {"gammaT", "P0", "P1", "P2", "P3", "pi1", "pi2", "pi3", "backend"};
  t.rows.assign(gts.size() * nb, std::vector<Cell>(8));
  t.labels.resize(t.rows.size());
  std::vector<double> err(t.rows.size(), 0.0);
  RowRunner runner(t.rows.size());
  numerics::parallel_for(t.rows.size(), [&](std::size_t r) {
    const std::size_t i = r / nb;
    const Backend b = backends[r % nb];
    auto& row = t.rows[r];
    t.labels[r] = to_string(b);
    row[0] = gts[i];
    runner.guard(r, to_string(b), [&] {
      const PulseShape p = make_pulse(spec, area, gts[i]);
      PhotocountDistribution d;
      if (b == Backend::Analytic)
        d = analytic::exclusive_Pn(p, kSystem, kNmax, quad_config(spec));
      else if (b == Backend::Exact)
        d = oracle::exact_distribution(p, kSystem, kNmax, quad_config(spec));
      else
        d = oracle::histogram_distribution(run_ensemble(spec, p, r), kNmax);
      for (int k = 0; k <= kNmax; ++k) row[static_cast<std::size_t>(1 + k)] = d.P(k);
      try {
        const auto pur = stats::purities(d);
        for (int k = 0; k < kNmax; ++k) row[static_cast<std::size_t>(5 + k)] = pur[static_cast<std::size_t>(k)];
      } catch (const std::domain_error&) {
      }
      err[r] = d.quad_error;
    });
  });
  Dataset out;
  out.tables.push_back(std::move(t));
  out.error_estimates = std::move(err);
  runner.collect(out);
  return out;
}

}  // namespace

std::string to_string(Backend b) {
  switch (b) {
    case Backend::Analytic:
      return "analytic";
    case Backend::Exact:
      return "exact";
    case Backend::MonteCarlo:
      return "monte-carlo";
    case Backend::All:
      return "all";
  }
  return "unknown";
}

Backend parse_backend(const std::string& s) {
  for (Backend b : {Backend::Analytic, Backend::Exact, Backend::MonteCarlo, Backend::All})
    if (to_string(b) == s) return b;
  throw std::invalid_argument("unknown backend '" + s + "' (analytic|exact|monte-carlo|all)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::ScanWidth:
      return "scan-width";
    case Command::ScanArea:
      return "scan-area";
    case Command::Densities:
      return "densities";
    case Command::G2Grid:
      return "g2grid";
    case Command::Distribution:
      return "distribution";
  }
  return "unknown";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::ScanWidth, Command::ScanArea, Command::Densities, Command::G2Grid, Command::Distribution})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown command '" + s + "'");
}

Grid Grid::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (!text.empty() && text.back() == ':') parts.emplace_back();
  if (parts.size() == 1) return single(parse_number(parts[0], "grid value"));
  if (parts.size() != 3 && parts.size() != 4)
    throw std::invalid_argument("grid must be a value or min:max:count[:linear|log], got '" + text + "'");
  Grid g;
  g.min = parse_number(parts[0], "grid min");
  g.max = parse_number(parts[1], "grid max");
  const double count = parse_number(parts[2], "grid count");
  if (count != std::floor(count) || count < 0 || count > 1e7)
    throw std::invalid_argument("grid count must be a non-negative integer");
  g.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log")
      g.log = true;
    else if (parts[3] != "linear")
      throw std::invalid_argument("grid spacing must be 'linear' or 'log'");
  }
  g.validate();
  return g;
}

void Grid::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) throw std::invalid_argument("grid bounds must be finite");
  if (count == 1 && min == max) return;
  if (count < 2) throw std::invalid_argument("grid count must be >= 2");
  if (!(min < max)) throw std::invalid_argument("grid requires min < max");
  if (log && !(min > 0.0)) throw std::invalid_argument("log spacing requires min > 0");
}

std::vector<double> Grid::values() const {
  validate();
  if (count == 1) return {min};
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    v[static_cast<std::size_t>(i)] =
        log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
  }
  v.front() = min;
  v.back() = max;
  return v;
}

std::string Grid::to_string() const {
  if (count == 1) return format_cell(min);
  return format_cell(min) + ":" + format_cell(max) + ":" + std::to_string(count) + (log ? ":log" : ":linear");
}

ScanSpec ScanSpec::defaults_for(Command c) {
  ScanSpec s;
  s.command = c;
  switch (c) {
    case Command::ScanWidth:
      s.area = Grid::single(1.0);
      s.gammaT = Grid{1e-2, 10.0, 40, true};
      break;
    case Command::ScanArea:
      s.area = Grid{0.0, 5.0, 51, false};
      s.gammaT = Grid::single(0.3);
      break;
    case Command::Densities:
      s.backend = Backend::Analytic;
      s.area = Grid::single(2.0);
      s.gammaT = Grid::single(1e-3);
      s.resolution = 101;
      break;
    case Command::G2Grid:
      s.backend = Backend::Exact;
      s.area = Grid::single(1.0);
      s.gammaT = Grid::single(3.3);
      s.resolution = 128;
      break;
    case Command::Distribution:
      s.area = Grid::single(2.0);
      s.gammaT = Grid{1e-3, 1.0, 16, true};
      break;
  }
  s.out = default_output(c);
  return s;
}

void ScanSpec::validate() const {
  area.validate();
  gammaT.validate();
  if (area.min < 0.0) throw std::invalid_argument("area must be >= 0");
  if (!(gammaT.min > 0.0)) throw std::invalid_argument("gammaT must be > 0");
  if (command != Command::ScanArea && area.count != 1) throw std::invalid_argument("--area must be a single value here");
  if ((command == Command::ScanArea || command == Command::Densities || command == Command::G2Grid) &&
      gammaT.count != 1)
    throw std::invalid_argument("--gammaT must be a single value here");
  if (!(tol > 0.0) || tol >= 1.0) throw std::invalid_argument("--tol must be in (0, 1)");
  if (trajectories < 1) throw std::invalid_argument("--trajectories must be >= 1");
  if (resolution < 2) throw std::invalid_argument("--resolution must be >= 2");
  if (!(gamma_per_second > 0.0)) throw std::invalid_argument("--gamma must be > 0");
  if (pulse != "square" && pulse != "gaussian" && pulse.rfind("tabulated:", 0) != 0)
    throw std::invalid_argument("--pulse must be square, gaussian or tabulated:<path>");
}

PulseShape make_pulse(const ScanSpec& spec, double area, double width) {
  if (spec.pulse == "square") return PulseShape::square(area, width);
  if (spec.pulse == "gaussian") return PulseShape::gaussian(area, width);
  const auto table = load_tabulated_csv(spec.pulse.substr(10), spec.time_unit, spec.gamma_per_second);
  return table.with_width(width).with_area(area);
}

Dataset run_scan(const ScanSpec& spec) {
  spec.validate();
  switch (spec.command) {
    case Command::ScanWidth:
      return scan_width(spec);
    case Command::ScanArea:
      return scan_area(spec);
    case Command::Densities:
      return densities(spec);
    case Command::G2Grid:
      return g2grid(spec);
    case Command::Distribution:
      return distribution(spec);
  }
  throw std::invalid_argument("unknown command");
}

std::filesystem::path default_output(Command c) {
  const char* dir = std::getenv("PULSEDTLS_OUT_DIR");
  const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path(".");
  return base / (to_string(c) + ".csv");
}

}  // namespace pulsedtls::cli
