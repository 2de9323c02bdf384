#pragma once

#include "lomac/driver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lomac {

// Flat key=value format with [grid], [method], [preset] and [output]
// sections. `[preset] name` (or a top-level `preset`) is required and selects
// the defaults every other key overrides.
SolverConfig load_config(const std::filesystem::path& path);
SolverConfig parse_config(std::istream& in, const std::string& origin = "<config>");

// Sets one qualified key such as "method.eps". Bare keys are accepted when
// they are unambiguous.
void set_config_value(SolverConfig& cfg, std::string_view key, std::string_view value);

// Parses "key=value" and applies it.
void apply_override(SolverConfig& cfg, std::string_view assignment);

// All qualified keys understood by the parser.
std::vector<std::string> config_keys();

// The configuration in the same text format, loadable by parse_config.
std::string render_config(const SolverConfig& cfg);

}  // namespace lomac
