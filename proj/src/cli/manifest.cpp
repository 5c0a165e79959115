#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "pulsedtls/cli/scan.hpp"
#include "pulsedtls/numerics/random.hpp"
#include "pulsedtls/simd/kernels.hpp"

namespace pulsedtls::cli {

namespace {

using nlohmann::json;

json grid_json(const Grid& g) { return {{"min", g.min}, {"max", g.max}, {"count", g.count}, {"log", g.log}}; }

Grid grid_from(const json& j) {
  Grid g{j.at("min").get<double>(), j.at("max").get<double>(), j.at("count").get<int>(), j.at("log").get<bool>()};
  g.validate();
  return g;
}

json spec_json(const ScanSpec& s) {
  return {{"command", to_string(s.command)},
          {"backend", to_string(s.backend)},
          {"pulse", s.pulse},
          {"area_pi", grid_json(s.area)},
          {"gammaT", grid_json(s.gammaT)},
          {"seed", s.seed},
          {"out", s.out.string()},
          {"tol", s.tol},
          {"time_unit", s.time_unit == TimeUnit::Seconds ? "seconds" : "inverse-gamma"},
          {"gamma_per_second", s.gamma_per_second},
          {"trajectories", s.trajectories},
          {"resolution", s.resolution}};
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& out) {
  auto p = out;
  p.replace_filename(out.stem().string() + ".manifest.json");
  return p;
}

std::string spec_to_json(const ScanSpec& spec) { return spec_json(spec).dump(2); }

ScanSpec spec_from_manifest(const std::filesystem::path& manifest) {
  std::ifstream f(manifest);
  if (!f) throw std::runtime_error("cannot open manifest " + manifest.string());
  const json root = json::parse(f);
  if (root.at("schema_version").get<int>() != kCsvSchemaVersion)
    throw std::runtime_error("unsupported manifest schema version");
  const json& j = root.at("parameters");
  ScanSpec s;
  s.command = parse_command(j.at("command").get<std::string>());
  s.backend = parse_backend(j.at("backend").get<std::string>());
  s.pulse = j.at("pulse").get<std::string>();
  s.area = grid_from(j.at("area_pi"));
  s.gammaT = grid_from(j.at("gammaT"));
  s.seed = j.at("seed").get<std::uint64_t>();
  s.out = j.at("out").get<std::string>();
  s.tol = j.at("tol").get<double>();
  s.time_unit = j.at("time_unit").get<std::string>() == "seconds" ? TimeUnit::Seconds : TimeUnit::InverseGamma;
  s.gamma_per_second = j.at("gamma_per_second").get<double>();
  s.trajectories = j.at("trajectories").get<std::size_t>();
  s.resolution = j.at("resolution").get<int>();
  s.validate();
  return s;
}

void write_manifest(const ScanSpec& spec, const Dataset& data, double wall_seconds,
                    const std::filesystem::path& path) {
  json outputs = json::array();
  for (const auto& t : data.tables) outputs.push_back(table_path(spec.out, t).string());
  json failures = json::array();
  for (const auto& f : data.failures) failures.push_back({{"row", f.row}, {"backend", f.backend}, {"error", f.message}});
  json summary = json::object();
  for (const auto& [k, v] : data.summary) summary[k] = v;
  const json root = {{"schema_version", kCsvSchemaVersion},
                     {"tool", "pulsedtls"},
                     {"tool_version", PULSEDTLS_VERSION},
                     {"parameters", spec_json(spec)},
                     {"seed", spec.seed},
                     {"rng", std::string(numerics::RandomStream::kAlgorithm)},
                     {"simd_isa", std::string(simd::to_string(simd::kernels().isa))},
                     {"wall_clock_seconds", wall_seconds},
                     {"outputs", outputs},
                     {"point_error_estimates", data.error_estimates},
                     {"failures", failures},
                     {"summary", summary}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << root.dump(2) << '\n';
}

}  // namespace pulsedtls::cli
