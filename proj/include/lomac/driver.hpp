#pragma once

#include "lomac/diagnostics.hpp"
#include "lomac/field.hpp"
#include "lomac/grid.hpp"
#include "lomac/ht.hpp"
#include "lomac/lowrank.hpp"
#include "lomac/macro.hpp"
#include "lomac/presets.hpp"
#include "lomac/projection.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace lomac {

// I: plain truncation. II: conservative truncation with the kinetic
// solution's own moments. III: moments taken from the macroscopic solver.
enum class Variant { nonconservative = 1, conservative = 2, lomac = 3 };

Variant parse_variant(std::string_view name);
std::string variant_name(Variant v);

struct SolverConfig {
  Preset preset = Preset::weak_landau_1d;
  int dims = 1;
  Variant variant = Variant::lomac;
  // Points per spatial / velocity direction.
  std::size_t nx = 64;
  std::size_t nv = 129;
  double v_max = 6.0;
  double beta = 2.0;
  double eps = 1e-5;
  TruncationMode trunc_mode = TruncationMode::absolute;
  double cfl = 0.3;
  double t_end = 20.0;
  // Fixed step when > 0; otherwise the CFL rule is applied every step.
  double dt = 0.0;
  int poisson_sign = 1;
  std::size_t rank_cap = 60;
  PresetParams params;
  std::size_t output_every = 1;
  std::size_t snapshot_every = 0;

  // Throws ConfigError naming the offending field and its valid range.
  void validate() const;
};

// Defaults of a benchmark problem.
SolverConfig preset_config(Preset p);

// Grids and projection bases derived from a configuration.
struct Discretization {
  int dims = 1;
  SpatialGrid x1;
  SpatialGrid x2;
  VelocityGrid v1;
  VelocityGrid v2;
  ProjectionBasis basis;
  ProjectionBasis4D basis4;
};

Discretization make_discretization(const SolverConfig& cfg);

// One time level. Exactly one of `f` (1D1V) / `g` (2D2V) is populated.
struct Level {
  double t = 0.0;
  LowRankMatrix f;
  HTTensor g;
  MacroState macro;
};

// Newest level first: levels[0] = n, levels[1] = n-1, levels[2] = n-2.
// Fewer than three levels means the startup phase is still running.
struct StepHistory {
  std::vector<Level> levels;
  std::size_t step = 0;
};

// -(D_x (x) v*) - (E* (x) D_v) with upwind splitting, scaled by coeff.
LowRankMatrix transport_terms_1d(const LowRankMatrix& f, const ElectricField& field,
                                 const SpatialGrid& x, const VelocityGrid& v, double coeff = 1.0);

double select_dt_1d(const ElectricField& field, const SpatialGrid& x, const VelocityGrid& v,
                    double cfl);
double select_dt_2d(const ElectricField& field, const SpatialGrid& x1, const SpatialGrid& x2,
                    const VelocityGrid& v1, const VelocityGrid& v2, double cfl);

class Solver {
 public:
  explicit Solver(SolverConfig cfg);
  Solver(SolverConfig cfg, StepHistory history);

  const SolverConfig& config() const { return cfg_; }
  const Discretization& discretization() const { return disc_; }
  const StepHistory& history() const { return history_; }
  const Level& current() const { return history_.levels.front(); }
  double time() const { return current().t; }
  bool finished() const;

  // Field of the current kinetic solution.
  ElectricField field() const;
  // Step size the next call to step() will use.
  double next_dt() const;
  void step();
  // Advances by exactly dt: Heun during startup, the multistep scheme after.
  void advance(double dt);
  // One update out = a A + b B + c dt L(B) followed by the variant's
  // truncation/correction. Public so the scheme can be checked stage by stage.
  Level update(const Level& a, const Level& b, StageCoefficients k, double dt) const;

  DiagnosticsRow diagnostics() const;

 private:
  Level update_1d(const Level& a, const Level& b, StageCoefficients k, double dt) const;
  Level update_2d(const Level& a, const Level& b, StageCoefficients k, double dt) const;
  void check_rank(const Level& level) const;
  // Truncation threshold on raw matrix entries equivalent to cfg.eps in the
  // discrete L2 norm.
  double plain_eps(bool weighted) const;
  HTTensor assemble_2d(const Moments2D& target, const HTTensor& f2t) const;

  SolverConfig cfg_;
  Discretization disc_;
  StepHistory history_;
};

ElectricField field_of(const Level& level, const Discretization& disc, int sign);
MacroState kinetic_macro(const Level& level, const Discretization& disc, int sign);

struct RunHooks {
  // Called after every completed step.
  std::function<void(const Solver&)> on_step;
};

// Steps to t_end recording diagnostics every output_every steps plus the
// final state.
DiagnosticsSeries run(const SolverConfig& cfg, const RunHooks& hooks = {});
DiagnosticsSeries run(Solver& solver, const RunHooks& hooks = {});

// Process-wide allocator settings suited to large per-step temporaries.
void tune_allocator();

}  // namespace lomac
