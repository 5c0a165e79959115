#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pulsedtls/cli/scan.hpp"

namespace pulsedtls::cli {

std::string format_cell(const Cell& c) {
  if (!c) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *c);
  return buf;
}

std::filesystem::path table_path(const std::filesystem::path& out, const Table& t) {
  if (t.suffix.empty()) return out;
  auto p = out;
  p.replace_filename(out.stem().string() + t.suffix + (out.has_extension() ? out.extension().string() : ".csv"));
  return p;
}

void write_csv(const Table& t, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < t.header.size(); ++i) f << (i ? "," : "") << t.header[i];
  f << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_cell(row[i]);
    if (!t.labels.empty()) f << ',' << t.labels[r];
    f << '\n';
  }
  if (!f) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace pulsedtls::cli
