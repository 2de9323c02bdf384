#include "lomac/config.hpp"

#include "lomac/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lomac {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "grid.nx",         "grid.nv",           "grid.v_max",      "method.variant",
      "method.eps",      "method.cfl",        "method.t_end",    "method.dt",
      "method.beta",     "method.trunc_mode", "method.rank_cap", "method.poisson_sign",
      "preset.name",     "preset.alpha",      "preset.k",        "preset.v0",
      "output.every",    "output.snapshot_every"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string qualify(std::string_view key) {
  const std::string k = trim(key);
  if (k == "preset") return "preset.name";
  if (k.find('.') != std::string::npos) {
    if (std::find(known_keys().begin(), known_keys().end(), k) == known_keys().end())
      throw ConfigError("unknown key '" + k + "'");
    return k;
  }
  std::string match;
  for (const auto& full : known_keys())
    if (full.substr(full.find('.') + 1) == k) match = full;
  if (match.empty()) throw ConfigError("unknown key '" + k + "'");
  return match;
}

double to_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("invalid value for '" + key + "': '" + value + "' is not a number");
  return x;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long x = 0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("invalid value for '" + key + "': '" + value + "' is not an integer");
  return x;
}

std::size_t to_count(const std::string& key, const std::string& value, long long min) {
  const long long x = to_integer(key, value);
  if (x < min)
    throw ConfigError("invalid value for '" + key + "': must be >= " + std::to_string(min));
  return static_cast<std::size_t>(x);
}

double bounded(const std::string& key, double x, bool ok, const char* range) {
  if (!ok) throw ConfigError("invalid value for '" + key + "': must be " + range);
  return x;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<std::string> config_keys() { return known_keys(); }

void set_config_value(SolverConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = qualify(raw_key);
  const std::string value = trim(raw_value);
  if (key == "preset.name") {
    const Preset p = parse_preset(value);
    if (p != cfg.preset) {
      // A different preset resets every default.
      const SolverConfig fresh = preset_config(p);
      cfg = fresh;
    }
  } else if (key == "grid.nx") {
    cfg.nx = to_count(key, value, static_cast<long long>(kMinGridPoints));
  } else if (key == "grid.nv") {
    cfg.nv = to_count(key, value, static_cast<long long>(kMinGridPoints));
  } else if (key == "grid.v_max") {
    const double x = to_double(key, value);
    cfg.v_max = bounded(key, x, x > 0.0, "> 0");
  } else if (key == "method.variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "method.eps") {
    const double x = to_double(key, value);
    cfg.eps = bounded(key, x, x >= 0.0, ">= 0");
  } else if (key == "method.cfl") {
    const double x = to_double(key, value);
    cfg.cfl = bounded(key, x, x > 0.0 && x <= 1.0, "in (0, 1]");
  } else if (key == "method.t_end") {
    const double x = to_double(key, value);
    cfg.t_end = bounded(key, x, x >= 0.0, ">= 0");
  } else if (key == "method.dt") {
    const double x = to_double(key, value);
    cfg.dt = bounded(key, x, x >= 0.0, ">= 0 (0 selects the CFL rule)");
  } else if (key == "method.beta") {
    const double x = to_double(key, value);
    cfg.beta = bounded(key, x, x > 0.0, "> 0");
  } else if (key == "method.trunc_mode") {
    if (value == "absolute")
      cfg.trunc_mode = TruncationMode::absolute;
    else if (value == "relative")
      cfg.trunc_mode = TruncationMode::relative;
    else
      throw ConfigError("invalid value for '" + key + "': must be absolute or relative");
  } else if (key == "method.rank_cap") {
    cfg.rank_cap = to_count(key, value, 1);
  } else if (key == "method.poisson_sign") {
    const long long s = to_integer(key, value);
    if (s != 1 && s != -1) throw ConfigError("invalid value for '" + key + "': must be 1 or -1");
    cfg.poisson_sign = static_cast<int>(s);
  } else if (key == "preset.alpha") {
    cfg.params.alpha = to_double(key, value);
  } else if (key == "preset.k") {
    const double x = to_double(key, value);
    cfg.params.k = bounded(key, x, x > 0.0, "> 0");
  } else if (key == "preset.v0") {
    cfg.params.v0 = to_double(key, value);
  } else if (key == "output.every") {
    cfg.output_every = to_count(key, value, 1);
  } else if (key == "output.snapshot_every") {
    cfg.snapshot_every = to_count(key, value, 0);
  }
}

void apply_override(SolverConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

SolverConfig parse_config(std::istream& in, const std::string& origin) {
  std::vector<Entry> entries;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](std::size_t n, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(n) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    const std::string text = trim(std::string_view(line).substr(0, comment));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(line_no, "unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section != "grid" && section != "method" && section != "preset" && section != "output")
        fail(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key");
    if (!section.empty()) key = section + "." + key;
    try {
      key = qualify(key);
    } catch (const ConfigError& e) {
      fail(line_no, e.what());
    }
    entries.push_back({key, value, line_no});
  }

  const auto named = std::find_if(entries.begin(), entries.end(),
                                  [](const Entry& e) { return e.key == "preset.name"; });
  if (named == entries.end()) {
    std::string listing;
    for (const auto& k : known_keys()) listing += "\n  " + k;
    throw ConfigError(origin + ": missing required key 'preset.name' (set `name = <preset>` under "
                      "[preset]); known keys:" + listing);
  }
  SolverConfig cfg;
  try {
    cfg = preset_config(parse_preset(named->value));
  } catch (const ConfigError& e) {
    fail(named->line, e.what());
  }
  for (const auto& e : entries) {
    if (e.key == "preset.name") continue;
    try {
      set_config_value(cfg, e.key, e.value);
    } catch (const Error& err) {
      fail(e.line, err.what());
    }
  }
  cfg.validate();
  return cfg;
}

SolverConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

std::string render_config(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "[preset]\nname = " << preset_name(cfg.preset) << "\nalpha = "
     << format_double(cfg.params.alpha) << "\nk = " << format_double(cfg.params.k)
     << "\nv0 = " << format_double(cfg.params.v0) << "\n\n[grid]\nnx = " << cfg.nx
     << "\nnv = " << cfg.nv << "\nv_max = " << format_double(cfg.v_max)
     << "\n\n[method]\nvariant = " << variant_name(cfg.variant)
     << "\neps = " << format_double(cfg.eps) << "\ncfl = " << format_double(cfg.cfl)
     << "\nt_end = " << format_double(cfg.t_end) << "\ndt = " << format_double(cfg.dt)
     << "\nbeta = " << format_double(cfg.beta) << "\ntrunc_mode = "
     << (cfg.trunc_mode == TruncationMode::absolute ? "absolute" : "relative")
     << "\nrank_cap = " << cfg.rank_cap << "\npoisson_sign = " << cfg.poisson_sign
     << "\n\n[output]\nevery = " << cfg.output_every
     << "\nsnapshot_every = " << cfg.snapshot_every << "\n";
  return os.str();
}

}  // namespace lomac
