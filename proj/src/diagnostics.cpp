#include "lomac/diagnostics.hpp"

#include "lomac/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lomac {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0')
    throw IoError("diagnostics line " + std::to_string(line) + ": bad number '" + s + "'");
  return x;
}

}  // namespace

std::string diagnostics_header(int dims) {
  if (dims == 1) return "t,rank,mass,mom1,energy,efield_energy,wall_ms";
  return "t,r12,r34,r3,r4,mass,mom1,mom2,energy,efield_energy,wall_ms";
}

void append_row(const DiagnosticsRow& row, std::ostream& sink) {
  sink << format_double(row.t);
  for (long long r : row.ranks) sink << ',' << r;
  sink << ',' << format_double(row.mass);
  for (double m : row.momentum) sink << ',' << format_double(m);
  sink << ',' << format_double(row.energy) << ',' << format_double(row.efield_energy) << ','
       << format_double(row.wall_ms) << '\n';
}

void write_diagnostics(const DiagnosticsSeries& series, std::ostream& sink) {
  sink << diagnostics_header(series.dims) << '\n';
  for (const auto& row : series.rows) append_row(row, sink);
}

void write_diagnostics(const DiagnosticsSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_diagnostics(series, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DiagnosticsSeries read_diagnostics(std::istream& source) {
  std::string line;
  if (!std::getline(source, line)) throw IoError("diagnostics: missing header");
  DiagnosticsSeries series;
  if (line == diagnostics_header(1)) {
    series.dims = 1;
  } else if (line == diagnostics_header(2)) {
    series.dims = 2;
  } else {
    throw IoError("diagnostics: unrecognized header '" + line + "'");
  }
  const std::size_t n_ranks = series.dims == 1 ? 1 : 4;
  const std::size_t n_mom = static_cast<std::size_t>(series.dims);
  const std::size_t width = 1 + n_ranks + 1 + n_mom + 3;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != width)
      throw IoError("diagnostics line " + std::to_string(line_no) + ": expected " +
                    std::to_string(width) + " columns");
    DiagnosticsRow row;
    std::size_t c = 0;
    row.t = parse_double(cells[c++], line_no);
    for (std::size_t i = 0; i < n_ranks; ++i) row.ranks.push_back(std::stoll(cells[c++]));
    row.mass = parse_double(cells[c++], line_no);
    for (std::size_t i = 0; i < n_mom; ++i) row.momentum.push_back(parse_double(cells[c++], line_no));
    row.energy = parse_double(cells[c++], line_no);
    row.efield_energy = parse_double(cells[c++], line_no);
    row.wall_ms = parse_double(cells[c++], line_no);
    series.rows.push_back(std::move(row));
  }
  return series;
}

DiagnosticsSeries read_diagnostics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_diagnostics(in);
}

}  // namespace lomac
