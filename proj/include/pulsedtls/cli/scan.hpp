#pragma once

// Scan drivers behind the command-line tool. Each command turns a ScanSpec
// into one or more CSV tables; rows are computed in parallel and assembled in
// grid order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsedtls/pulse.hpp"

namespace pulsedtls::cli {

inline constexpr int kCsvSchemaVersion = 1;

enum class Backend { Analytic, Exact, MonteCarlo, All };

std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

/// A single value or a `min:max:count[:linear|log]` grid.
struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  bool log = false;

  static Grid single(double v) { return {v, v, 1, false}; }
  static Grid parse(const std::string& text);
  /// Throws std::invalid_argument unless the grid is a single value or has
  /// count >= 2, min < max and (for log spacing) min > 0.
  void validate() const;
  std::vector<double> values() const;
  std::string to_string() const;
};

enum class Command { ScanWidth, ScanArea, Densities, G2Grid, Distribution };

std::string to_string(Command c);
Command parse_command(const std::string& s);

struct ScanSpec {
  Command command = Command::ScanWidth;
  Backend backend = Backend::All;
  /// square | gaussian | tabulated:<path>
  std::string pulse = "square";
  /// Total area in multiples of π (a grid for scan-area).
  Grid area = Grid::single(1.0);
  Grid gammaT = Grid::single(0.1);
  std::uint64_t seed = 1;
  std::filesystem::path out;
  double tol = 1e-8;
  TimeUnit time_unit = TimeUnit::InverseGamma;
  /// Decay rate in 1/s, used to convert tabulated pulses given in seconds.
  double gamma_per_second = 1.0;
  std::size_t trajectories = 20000;
  /// Points per axis for densities and g2grid.
  int resolution = 101;

  /// Fills in per-command defaults for fields the user left unset.
  static ScanSpec defaults_for(Command c);
  void validate() const;
  bool uses(Backend b) const { return backend == Backend::All || backend == b; }
};

/// One table cell: empty when the value is undefined or its backend failed.
using Cell = std::optional<double>;

struct Table {
  /// Appended to the output stem ("" for the main file, "_1d" etc. otherwise).
  std::string suffix;
  std::vector<std::string> header;
  /// Numeric cells; a trailing text column (e.g. backend) goes in `labels`.
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> labels;
};

struct PointFailure {
  std::size_t row;
  std::string backend;
  std::string message;
};

struct Dataset {
  std::vector<Table> tables;
  /// Per-row absolute error estimates of the main table.
  std::vector<double> error_estimates;
  std::vector<PointFailure> failures;
  /// Extra scalar results worth recording in the manifest.
  std::vector<std::pair<std::string, double>> summary;
};

/// Builds the pulse described by spec.pulse with the given area and width.
PulseShape make_pulse(const ScanSpec& spec, double area, double width);

Dataset run_scan(const ScanSpec& spec);

/// Formats with 17 significant digits; empty for a missing cell.
std::string format_cell(const Cell& c);
void write_csv(const Table& t, const std::filesystem::path& path);
std::filesystem::path table_path(const std::filesystem::path& out, const Table& t);

/// Default output path: $PULSEDTLS_OUT_DIR/<command>.csv, else ./<command>.csv.
std::filesystem::path default_output(Command c);

std::filesystem::path manifest_path(const std::filesystem::path& out);
std::string spec_to_json(const ScanSpec& spec);
ScanSpec spec_from_manifest(const std::filesystem::path& manifest);
void write_manifest(const ScanSpec& spec, const Dataset& data, double wall_seconds,
                    const std::filesystem::path& path);

}  // namespace pulsedtls::cli
