#pragma once

#include "lomac/driver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace lomac {

inline constexpr std::uint64_t kSnapshotVersion = 1;

// Configuration plus the full multistep history, enough to resume a run
// bit-exactly.
struct Snapshot {
  SolverConfig config;
  StepHistory history;
};

// Layout: 8-byte magic, then little-endian 8-byte integers and IEEE doubles.
// Every matrix block is prefixed by its row and column counts and stored
// column-major.
void snapshot_write(const Snapshot& snap, std::ostream& out);
void snapshot_write(const Snapshot& snap, const std::filesystem::path& path);
Snapshot snapshot_read(std::istream& in);
Snapshot snapshot_read(const std::filesystem::path& path);

Snapshot snapshot_of(const Solver& solver);

// Human-readable description of the header and stored levels.
std::string snapshot_summary(const Snapshot& snap);

}  // namespace lomac
