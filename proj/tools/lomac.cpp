// Command-line front end: run, convergence, compare, inspect.
#include "lomac/config.hpp"
#include "lomac/driver.hpp"
#include "lomac/errors.hpp"
#include "lomac/snapshot.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace lomac;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "Configuration file")->check(CLI::ExistingFile);
  app->add_option("--preset", o.preset, "Benchmark preset");
  app->add_option("--set", o.overrides, "Override, key=value (repeatable)");
  app->add_option("--out", o.out_dir, "Output directory");
}

SolverConfig resolve(const CommonOptions& o) {
  SolverConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
    if (!o.preset.empty()) set_config_value(cfg, "preset.name", o.preset);
  } else {
    cfg = preset_config(o.preset.empty() ? Preset::weak_landau_1d : parse_preset(o.preset));
  }
  for (const auto& s : o.overrides) apply_override(cfg, s);
  cfg.validate();
  return cfg;
}

fs::path output_dir(const CommonOptions& o) {
  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_run(const CommonOptions& o, std::size_t snapshot_every, const std::string& resume) {
  SolverConfig cfg;
  std::unique_ptr<Solver> solver;
  if (!resume.empty()) {
    Snapshot snap = snapshot_read(fs::path(resume));
    cfg = snap.config;
    for (const auto& s : o.overrides) apply_override(cfg, s);
    solver = std::make_unique<Solver>(cfg, std::move(snap.history));
  } else {
    cfg = resolve(o);
    solver = std::make_unique<Solver>(cfg);
  }
  if (snapshot_every == 0) snapshot_every = cfg.snapshot_every;
  const fs::path dir = output_dir(o);
  RunHooks hooks;
  if (snapshot_every > 0) {
    hooks.on_step = [&](const Solver& s) {
      if (s.history().step % snapshot_every == 0) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06zu.bin", s.history().step);
        snapshot_write(snapshot_of(s), dir / name);
      }
    };
  }
  const DiagnosticsSeries series = run(*solver, hooks);
  write_diagnostics(series, dir / "diagnostics.csv");
  std::ofstream(dir / "config.ini") << render_config(cfg);
  const auto& last = series.rows.back();
  std::printf("%s variant %s: %zu steps to t=%.6g, wrote %s\n", preset_name(cfg.preset).c_str(),
              variant_name(cfg.variant).c_str(), solver->history().step, last.t,
              (dir / "diagnostics.csv").string().c_str());
  return 0;
}

int cmd_convergence(CommonOptions o, const std::vector<std::size_t>& sizes) {
  if (o.preset.empty() && o.config_path.empty()) o.preset = "forced";
  const SolverConfig base = resolve(o);
  if (base.preset != Preset::forced)
    throw ConfigError("convergence requires the forced preset (the only one with an exact solution)");
  std::ostringstream table;
  table << "N,linf,linf_order,l2,l2_order,rank,steps\n";
  std::printf("%6s %12s %8s %12s %8s %5s\n", "N", "Linf", "order", "L2", "order", "rank");
  double prev_inf = 0.0, prev_l2 = 0.0;
  std::size_t prev_n = 0;
  for (std::size_t n : sizes) {
    SolverConfig cfg = base;
    cfg.nx = n;
    cfg.nv = 2 * n;
    Solver solver(cfg);
    run(solver);
    const auto& d = solver.discretization();
    const auto err = forced::error(solver.current().f, d.x1, d.v1, solver.time());
    double o_inf = std::nan(""), o_l2 = std::nan("");
    if (prev_n) {
      const double ratio = std::log(static_cast<double>(n) / static_cast<double>(prev_n));
      o_inf = std::log(prev_inf / err.linf) / ratio;
      o_l2 = std::log(prev_l2 / err.l2) / ratio;
    }
    std::printf("%6zu %12.3e %8.2f %12.3e %8.2f %5lld\n", n, err.linf, o_inf, err.l2, o_l2,
                static_cast<long long>(solver.current().f.rank()));
    char line[200];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%lld,%zu\n", n, err.linf, o_inf,
                  err.l2, o_l2, static_cast<long long>(solver.current().f.rank()),
                  solver.history().step);
    table << line;
    prev_inf = err.linf;
    prev_l2 = err.l2;
    prev_n = n;
  }
  if (!o.out_dir.empty()) std::ofstream(output_dir(o) / "convergence.csv") << table.str();
  return 0;
}

int cmd_compare(const CommonOptions& o) {
  const SolverConfig base = resolve(o);
  const fs::path dir = output_dir(o);
  std::ofstream merged(dir / "compare.csv");
  merged << "variant," << diagnostics_header(base.dims) << "\n";
  for (Variant v : {Variant::nonconservative, Variant::conservative, Variant::lomac}) {
    SolverConfig cfg = base;
    cfg.variant = v;
    const DiagnosticsSeries series = run(cfg);
    for (const auto& row : series.rows) {
      merged << variant_name(v) << ',';
      append_row(row, merged);
    }
    const auto& first = series.rows.front();
    const auto& last = series.rows.back();
    std::printf("variant %-3s mass drift %.3e  energy drift %.3e  final rank %lld\n",
                variant_name(v).c_str(), std::abs(last.mass - first.mass) / std::abs(first.mass),
                std::abs(last.energy - first.energy) / std::abs(first.energy), last.ranks.front());
  }
  std::printf("wrote %s\n", (dir / "compare.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"Conservative low-rank Vlasov-Poisson solver"};
  app.require_subcommand(1);

  CommonOptions run_opts, conv_opts, cmp_opts;
  std::size_t snapshot_every = 0;
  std::string resume;
  auto* run_cmd = app.add_subcommand("run", "Run one configuration and write diagnostics.csv");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--snapshot-every", snapshot_every, "Write a snapshot every N steps");
  run_cmd->add_option("--resume", resume, "Continue from a snapshot")->check(CLI::ExistingFile);

  std::vector<std::size_t> sizes{32, 64, 128, 256};
  auto* conv_cmd = app.add_subcommand("convergence", "Error table for the forced problem");
  add_common(conv_cmd, conv_opts);
  conv_cmd->add_option("--n", sizes, "Grid sizes N (N_x = N, N_v = 2N)")->delimiter(',');

  auto* cmp_cmd = app.add_subcommand("compare", "Run variants I, II and III on one preset");
  add_common(cmp_cmd, cmp_opts);

  std::string snapshot_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "Describe a snapshot file");
  inspect_cmd->add_option("snapshot", snapshot_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_opts, snapshot_every, resume);
    if (*conv_cmd) return cmd_convergence(conv_opts, sizes);
    if (*cmp_cmd) return cmd_compare(cmp_opts);
    if (*inspect_cmd) {
      std::cout << snapshot_summary(snapshot_read(fs::path(snapshot_path)));
      return 0;
    }
  } catch (const lomac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
