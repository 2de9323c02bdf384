#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lomac {

// One output record. `ranks` holds {r} in 1D1V and {r12, r34, r3, r4} in 2D2V.
struct DiagnosticsRow {
  double t = 0.0;
  std::vector<long long> ranks;
  double mass = 0.0;
  std::vector<double> momentum;
  double energy = 0.0;
  double efield_energy = 0.0;
  double wall_ms = 0.0;
};

struct DiagnosticsSeries {
  int dims = 1;
  std::vector<DiagnosticsRow> rows;
};

std::string diagnostics_header(int dims);

// Writes one CSV line; floats carry 17 significant digits.
void append_row(const DiagnosticsRow& row, std::ostream& sink);

void write_diagnostics(const DiagnosticsSeries& series, const std::filesystem::path& path);
void write_diagnostics(const DiagnosticsSeries& series, std::ostream& sink);

DiagnosticsSeries read_diagnostics(const std::filesystem::path& path);
DiagnosticsSeries read_diagnostics(std::istream& source);

}  // namespace lomac
