// pulsedtls: photon-emission statistics of a pulsed two-level emitter.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "pulsedtls/cli/scan.hpp"

namespace {

using namespace pulsedtls;
using namespace pulsedtls::cli;

struct Flags {
  std::string pulse, area, gammaT, backend, out, time_unit;
  std::uint64_t seed = 0;
  double tol = 0.0, gamma = 0.0;
  std::size_t trajectories = 0;
  int resolution = 0;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }
};

void add_common(CLI::App* sub, Flags& f) {
  f.opts["pulse"] = sub->add_option("--pulse", f.pulse, "square | gaussian | tabulated:<path>");
  f.opts["area"] = sub->add_option("--area", f.area, "total area in multiples of pi (value or min:max:count[:log])");
  f.opts["gammaT"] = sub->add_option("--gammaT", f.gammaT, "gamma*T (value or min:max:count[:linear|log])");
  f.opts["backend"] = sub->add_option("--backend", f.backend, "analytic | exact | monte-carlo | all");
  f.opts["seed"] = sub->add_option("--seed", f.seed, "Monte Carlo seed");
  f.opts["out"] = sub->add_option("--out", f.out, "output CSV path");
  f.opts["tol"] = sub->add_option("--tol", f.tol, "relative quadrature tolerance");
  f.opts["time-unit"] = sub->add_option("--time-unit", f.time_unit, "tabulated pulse times: gamma | seconds");
  f.opts["gamma"] = sub->add_option("--gamma", f.gamma, "decay rate in 1/s for --time-unit seconds");
  f.opts["trajectories"] = sub->add_option("--trajectories", f.trajectories, "Monte Carlo trajectories per point");
  f.opts["resolution"] = sub->add_option("--resolution", f.resolution, "points per axis (densities, g2grid)");
}

ScanSpec resolve(Command c, const Flags& f) {
  ScanSpec s = ScanSpec::defaults_for(c);
  if (f.given("pulse")) s.pulse = f.pulse;
  if (f.given("area")) s.area = Grid::parse(f.area);
  if (f.given("gammaT")) s.gammaT = Grid::parse(f.gammaT);
  if (f.given("backend")) s.backend = parse_backend(f.backend);
  if (f.given("seed")) s.seed = f.seed;
  if (f.given("out")) s.out = f.out;
  if (f.given("tol")) s.tol = f.tol;
  if (f.given("time-unit")) {
    if (f.time_unit == "seconds")
      s.time_unit = TimeUnit::Seconds;
    else if (f.time_unit == "gamma")
      s.time_unit = TimeUnit::InverseGamma;
    else
      throw std::invalid_argument("--time-unit must be 'gamma' or 'seconds'");
  }
  if (f.given("gamma")) s.gamma_per_second = f.gamma;
  if (f.given("trajectories")) s.trajectories = f.trajectories;
  if (f.given("resolution")) s.resolution = f.resolution;
  s.validate();
  return s;
}

int execute(const ScanSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset data = run_scan(spec);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& t : data.tables) {
    const auto path = table_path(spec.out, t);
    write_csv(t, path);
    std::cout << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
  }
  const auto mpath = manifest_path(spec.out);
  write_manifest(spec, data, wall, mpath);
  std::cout << "wrote " << mpath.string() << '\n';
  for (const auto& [k, v] : data.summary) std::printf("%s = %.10g\n", k.c_str(), v);
  for (const auto& f : data.failures)
    std::cerr << "row " << f.row << " (" << f.backend << ") failed: " << f.message << '\n';
  return data.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-emission statistics of a pulsed, driven two-level emitter"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PULSEDTLS_VERSION);

  const std::pair<Command, const char*> commands[] = {
      {Command::ScanWidth, "P1, P2 and g2 against gamma*T at fixed area"},
      {Command::ScanArea, "emission statistics against pulse area at fixed gamma*T"},
      {Command::Densities, "marginal and joint emission densities on the area axis"},
      {Command::G2Grid, "two-time correlation G2(t1, t2)"},
      {Command::Distribution, "photocount distribution and purities against gamma*T"},
  };
  std::map<CLI::App*, Command> subs;
  std::map<CLI::App*, Flags> flags;
  for (const auto& [c, help] : commands) {
    auto* sub = app.add_subcommand(to_string(c), help);
    subs[sub] = c;
    add_common(sub, flags[sub]);
  }
  std::string manifest, rerun_out;
  auto* rerun = app.add_subcommand("rerun", "re-run a dataset from its manifest");
  rerun->add_option("manifest", manifest, "manifest JSON written by an earlier run")->required();
  rerun->add_option("--out", rerun_out, "write to this path instead of the recorded one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (rerun->parsed()) {
      ScanSpec spec = spec_from_manifest(manifest);
      if (!rerun_out.empty()) spec.out = rerun_out;
      return execute(spec);
    }
    for (auto& [sub, c] : subs)
      if (sub->parsed()) return execute(resolve(c, flags.at(sub)));
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
