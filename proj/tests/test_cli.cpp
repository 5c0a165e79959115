#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pulsedtls/cli/scan.hpp"

namespace fs = std::filesystem;
using namespace pulsedtls::cli;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PULSEDTLS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "pulsedtls_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = Grid::parse("0.01:10:4:log");
  CHECK(g.count == 4);
  CHECK(g.log);
  const auto v = g.values();
  REQUIRE(v.size() == 4);
  CHECK(v.front() == 0.01);
  CHECK(v.back() == 10.0);
  CHECK(v[1] == doctest::Approx(0.1));
  CHECK(Grid::parse("0.3").values() == std::vector<double>{0.3});
  CHECK(Grid::parse("0:5:6").values()[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(Grid::parse("0.1:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::parse("0.1:1:1"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::parse("1:0.1:5"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::parse("0:1:5:log"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::parse("0:1:5:cubic"), std::invalid_argument);
  CHECK_THROWS_AS(Grid::parse("a:1:5"), std::invalid_argument);
}

TEST_CASE("cell formatting round-trips doubles") {
  CHECK(format_cell(std::nullopt).empty());
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_cell(x)) == x);
}

TEST_CASE("zero-length grid is a usage error") {
  CHECK(run("scan-width --gammaT 0.1:1:0 --out " + scratch("bad.csv").string()) == 2);
  CHECK(run("scan-area --area 3:1:5 --out " + scratch("bad.csv").string()) == 2);
  CHECK(run("scan-width --backend nonsense") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("scan-width writes the documented columns") {
  const auto out = scratch("width.csv");
  REQUIRE(run("scan-width --gammaT 0.01:1:3:log --trajectories 200 --out " + out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("gammaT,P1_analytic,P2_analytic,P1_exact,P2_exact,g2_analytic,g2_exact,err_est", 0) == 0);
  CHECK(fs::exists(manifest_path(out)));
}

TEST_CASE("rerunning a manifest reproduces every dataset byte for byte") {
  const std::pair<std::string, std::vector<std::string>> cases[] = {
      {"scan-width --gammaT 0.01:1:3:log --trajectories 300 --seed 5", {""}},
      {"scan-area --area 0:3:4 --backend all --trajectories 300", {""}},
      {"densities --resolution 9", {"_1d", "_p2_joint", "_p3_sym"}},
      {"g2grid --gammaT 0.5 --resolution 12", {""}},
      {"distribution --gammaT 0.01:1:3:log --trajectories 300", {""}},
  };
  int k = 0;
  for (const auto& [args, suffixes] : cases) {
    CAPTURE(args);
    const auto first = scratch("run" + std::to_string(k) + ".csv");
    const auto second = scratch("rerun" + std::to_string(k) + ".csv");
    ++k;
    REQUIRE(run(args + " --out " + first.string()) == 0);
    REQUIRE(run("rerun " + manifest_path(first).string() + " --out " + second.string()) == 0);
    for (const auto& s : suffixes) {
      Table t;
      t.suffix = s;
      const auto a = table_path(first, t);
      const auto b = table_path(second, t);
      REQUIRE(fs::exists(a));
      CHECK(slurp(a) == slurp(b));
    }
  }
}
