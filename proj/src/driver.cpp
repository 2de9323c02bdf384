#include "lomac/driver.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "lomac/errors.hpp"
#include "lomac/fdops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace lomac {

namespace {

std::string range_error(const std::string& key, const std::string& range) {
  return "invalid value for '" + key + "': must be " + range;
}

Moments1D as_moments(const Vector& rho, const Vector& j, const Vector& kappa) {
  return Moments1D{rho, j, kappa};
}

Moments2D minus(const Moments2D& a, const Moments2D& b) {
  return Moments2D{a.rho - b.rho, a.j1 - b.j1, a.j2 - b.j2, a.kappa - b.kappa};
}

double time_slack(double t_end) { return 1e-12 * std::max(1.0, std::abs(t_end)); }

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "I" || name == "1" || name == "nonconservative") return Variant::nonconservative;
  if (name == "II" || name == "2" || name == "conservative") return Variant::conservative;
  if (name == "III" || name == "3" || name == "lomac") return Variant::lomac;
  throw ConfigError("unknown method variant '" + std::string(name) + "' (expected I, II or III)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::nonconservative: return "I";
    case Variant::conservative: return "II";
    case Variant::lomac: return "III";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (dims != preset_dims(preset))
    throw ConfigError("preset '" + preset_name(preset) + "' is " +
                      std::to_string(preset_dims(preset)) + "D but dims = " + std::to_string(dims));
  if (nx < kMinGridPoints) throw ConfigError(range_error("grid.nx", ">= 8"));
  if (nv < kMinGridPoints) throw ConfigError(range_error("grid.nv", ">= 8"));
  if (!(v_max > 0.0)) throw ConfigError(range_error("grid.v_max", "> 0"));
  if (!(beta > 0.0)) throw ConfigError(range_error("method.beta", "> 0"));
  if (!(eps >= 0.0)) throw ConfigError(range_error("method.eps", ">= 0"));
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError(range_error("method.cfl", "in (0, 1]"));
  if (!(t_end >= 0.0)) throw ConfigError(range_error("method.t_end", ">= 0"));
  if (!(dt >= 0.0)) throw ConfigError(range_error("method.dt", ">= 0 (0 selects the CFL rule)"));
  if (poisson_sign != 1 && poisson_sign != -1)
    throw ConfigError(range_error("method.poisson_sign", "1 or -1"));
  if (rank_cap < 1) throw ConfigError(range_error("method.rank_cap", ">= 1"));
  if (output_every < 1) throw ConfigError(range_error("output.every", ">= 1"));
  if (preset != Preset::forced && !(params.k > 0.0))
    throw ConfigError(range_error("preset.k", "> 0"));
}

SolverConfig preset_config(Preset p) {
  SolverConfig c;
  c.preset = p;
  c.dims = preset_dims(p);
  switch (p) {
    case Preset::forced:
      c.nx = 128;
      c.nv = 256;
      c.v_max = 4.0;
      c.eps = 1e-4;
      c.t_end = 1.0;
      c.cfl = 0.175;
      break;
    case Preset::weak_landau_1d:
      c.params = {0.01, 0.5, 0.0};
      c.nx = 64;
      c.nv = 129;
      c.v_max = 6.0;
      c.eps = 1e-5;
      c.t_end = 20.0;
      break;
    case Preset::strong_landau_1d:
      c.params = {0.5, 0.5, 0.0};
      c.nx = 64;
      c.nv = 129;
      c.v_max = 6.0;
      c.eps = 1e-3;
      c.t_end = 20.0;
      break;
    case Preset::bump_on_tail:
      c.params = {0.04, 0.3, 0.0};
      c.nx = 128;
      c.nv = 256;
      c.v_max = 10.0;
      c.beta = 3.0;
      c.eps = 1e-4;
      c.t_end = 10.0;
      break;
    case Preset::weak_landau_2d2v:
      c.params = {0.01, 0.5, 0.0};
      c.nx = 16;
      c.nv = 32;
      c.v_max = 6.0;
      c.eps = 1e-5;
      c.t_end = 5.0;
      break;
    case Preset::two_stream_2d2v:
      c.params = {0.001, 0.2, 2.4};
      c.nx = 32;
      c.nv = 64;
      c.v_max = 8.0;
      c.eps = 1e-5;
      c.t_end = 20.0;
      break;
  }
  return c;
}

Discretization make_discretization(const SolverConfig& cfg) {
  cfg.validate();
  Discretization d;
  d.dims = cfg.dims;
  const Interval dom = preset_domain(cfg.preset, cfg.params);
  d.x1 = make_spatial_grid(cfg.nx, dom.lo, dom.hi);
  d.v1 = make_velocity_grid(cfg.nv, cfg.v_max, WeightFunction{cfg.beta});
  if (cfg.dims == 1) {
    d.basis = make_projection_basis(d.v1);
  } else {
    d.x2 = d.x1;
    d.v2 = d.v1;
    d.basis4 = make_projection_basis_4d(d.v1, d.v2);
  }
  return d;
}

LowRankMatrix transport_terms_1d(const LowRankMatrix& f, const ElectricField& field,
                                 const SpatialGrid& x, const VelocityGrid& v, double coeff) {
  if (f.nx() != static_cast<Eigen::Index>(x.n) || f.nv() != static_cast<Eigen::Index>(v.n))
    throw DimensionError("transport_terms_1d: factor lengths do not match grids");
  if (field.e1.size() != f.nx()) throw DimensionError("transport_terms_1d: field size mismatch");
  const Eigen::Index r = f.rank();
  LowRankMatrix out;
  out.x.resize(f.nx(), 4 * r);
  out.v.resize(f.nv(), 4 * r);
  out.coef.resize(4 * r);
  if (r == 0) return out;
  const Boundary bx = x.periodic ? Boundary::periodic : Boundary::zero;
  out.x.middleCols(0, r) = upwind_derivative_columns(f.x, Upwind::plus, x.h, bx);
  out.x.middleCols(r, r) = upwind_derivative_columns(f.x, Upwind::minus, x.h, bx);
  out.x.middleCols(2 * r, r) = field.e1.cwiseMax(0.0).asDiagonal() * f.x;
  out.x.middleCols(3 * r, r) = field.e1.cwiseMin(0.0).asDiagonal() * f.x;
  out.v.middleCols(0, r) = v.nodes.cwiseMax(0.0).asDiagonal() * f.v;
  out.v.middleCols(r, r) = v.nodes.cwiseMin(0.0).asDiagonal() * f.v;
  out.v.middleCols(2 * r, r) = upwind_derivative_columns(f.v, Upwind::plus, v.h, Boundary::zero);
  out.v.middleCols(3 * r, r) = upwind_derivative_columns(f.v, Upwind::minus, v.h, Boundary::zero);
  for (int b = 0; b < 4; ++b) out.coef.segment(b * r, r) = -coeff * f.coef;
  return out;
}

double select_dt_1d(const ElectricField& field, const SpatialGrid& x, const VelocityGrid& v,
                    double cfl) {
  return cfl / (v.v_max / x.h + field.max_abs(1) / v.h);
}

double select_dt_2d(const ElectricField& field, const SpatialGrid& x1, const SpatialGrid& x2,
                    const VelocityGrid& v1, const VelocityGrid& v2, double cfl) {
  return cfl / (v1.v_max / x1.h + v2.v_max / x2.h + field.max_abs(1) / v1.h +
                field.max_abs(2) / v2.h);
}

ElectricField field_of(const Level& level, const Discretization& disc, int sign) {
  if (disc.dims == 1) return solve_poisson(moments(level.f, disc.v1).rho, disc.x1, sign);
  return solve_poisson(ht_moments(level.g, disc.v1, disc.v2).rho, disc.x1, disc.x2, sign);
}

MacroState kinetic_macro(const Level& level, const Discretization& disc, int sign) {
  if (disc.dims == 1) {
    const Moments1D m = moments(level.f, disc.v1);
    const ElectricField e = solve_poisson(m.rho, disc.x1, sign);
    return macro_from_moments(m.rho, m.j, Vector(), m.kappa, e);
  }
  const Moments2D m = ht_moments(level.g, disc.v1, disc.v2);
  const ElectricField e = solve_poisson(m.rho, disc.x1, disc.x2, sign);
  return macro_from_moments(m.rho, m.j1, m.j2, m.kappa, e);
}

Solver::Solver(SolverConfig cfg) : cfg_(std::move(cfg)), disc_(make_discretization(cfg_)) {
  Level level;
  level.t = 0.0;
  // Conservative variants start from the moment-preserving decomposition of
  // the initial data.
  const bool conservative = cfg_.variant != Variant::nonconservative;
  if (cfg_.dims == 1) {
    level.f = initial_1d(cfg_.preset, cfg_.params, disc_.x1, disc_.v1);
    if (conservative)
      level.f = conservative_truncate(level.f, disc_.basis, plain_eps(true), cfg_.trunc_mode);
  } else {
    level.g = initial_2d(cfg_.preset, cfg_.params, disc_.x1, disc_.x2, disc_.v1, disc_.v2);
    if (conservative) {
      const Moments2D m = ht_moments(level.g, disc_.v1, disc_.v2);
      const HTTensor f2 = ht_project_complement(level.g, disc_.basis4);
      const HTTensor f2t =
          ht_weighted_truncate(f2, disc_.v1.w, disc_.v2.w, plain_eps(true), cfg_.trunc_mode);
      level.g = assemble_2d(m, f2t);
    }
  }
  level.macro = kinetic_macro(level, disc_, cfg_.poisson_sign);
  history_.levels.push_back(std::move(level));
}

Solver::Solver(SolverConfig cfg, StepHistory history)
    : cfg_(std::move(cfg)), disc_(make_discretization(cfg_)), history_(std::move(history)) {
  if (history_.levels.empty() || history_.levels.size() > 3)
    throw ConfigError("step history must hold between one and three levels");
}

bool Solver::finished() const { return time() >= cfg_.t_end - time_slack(cfg_.t_end); }

ElectricField Solver::field() const { return field_of(current(), disc_, cfg_.poisson_sign); }

double Solver::next_dt() const {
  double dt = cfg_.dt;
  if (dt <= 0.0) {
    const ElectricField e = field();
    dt = cfg_.dims == 1 ? select_dt_1d(e, disc_.x1, disc_.v1, cfg_.cfl)
                        : select_dt_2d(e, disc_.x1, disc_.x2, disc_.v1, disc_.v2, cfg_.cfl);
  }
  const double remaining = cfg_.t_end - time();
  return std::min(dt, remaining);
}

void Solver::step() { advance(next_dt()); }

void Solver::advance(double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be > 0");
  auto& levels = history_.levels;
  const Level& now = levels.front();
  Level next;
  if (levels.size() < 3) {
    // Two-stage Heun: u1 = u + dt L(u); u' = u/2 + u1/2 + dt/2 L(u1).
    const Level stage = update(now, now, StageCoefficients{0.0, 1.0, 1.0}, dt);
    next = update(now, stage, StageCoefficients{0.5, 0.5, 0.5}, dt);
  } else {
    // Variable-step form of the SSP multistep scheme; uniform steps give
    // the (1/4, 3/4, 3/2) triple.
    const double span = now.t - levels[2].t;
    const double ratio = dt / span;
    next = update(levels[2], now, StageCoefficients{ratio * ratio, 1.0 - ratio * ratio, 1.0 + ratio},
                  dt);
  }
  next.t = now.t + dt;
  check_rank(next);
  levels.insert(levels.begin(), std::move(next));
  if (levels.size() > 3) levels.pop_back();
  ++history_.step;
}

Level Solver::update(const Level& a, const Level& b, StageCoefficients k, double dt) const {
  return cfg_.dims == 1 ? update_1d(a, b, k, dt) : update_2d(a, b, k, dt);
}

double Solver::plain_eps(bool weighted) const {
  // eps bounds the discrete L2 error sqrt(cell volume * sum e^2). Weighted
  // truncation already folds h_v into the weight vector. Relative thresholds
  // are scale-free.
  if (cfg_.trunc_mode == TruncationMode::relative) return cfg_.eps;
  double cell = disc_.x1.h;
  if (cfg_.dims == 2) cell *= disc_.x2.h;
  if (!weighted) cell *= cfg_.dims == 1 ? disc_.v1.h : disc_.v1.h * disc_.v2.h;
  return cfg_.eps / std::sqrt(cell);
}

Level Solver::update_1d(const Level& a, const Level& b, StageCoefficients k, double dt) const {
  const Moments1D mb = moments(b.f, disc_.v1);
  const ElectricField eb = solve_poisson(mb.rho, disc_.x1, cfg_.poisson_sign);

  std::vector<LowRankMatrix> terms;
  if (k.a != 0.0) terms.push_back(scaled(a.f, k.a));
  terms.push_back(scaled(b.f, k.b));
  terms.push_back(transport_terms_1d(b.f, eb, disc_.x1, disc_.v1, k.c * dt));
  const bool forced = cfg_.preset == Preset::forced;
  if (forced) terms.push_back(scaled(forced::kinetic_source(disc_.x1, disc_.v1, b.t), k.c * dt));
  const LowRankMatrix star = add(terms);

  Level out;
  out.t = b.t + dt;
  switch (cfg_.variant) {
    case Variant::nonconservative:
      out.f = truncate(star, plain_eps(false), cfg_.trunc_mode);
      break;
    case Variant::conservative:
      out.f = conservative_truncate(star, disc_.basis, plain_eps(true), cfg_.trunc_mode);
      break;
    case Variant::lomac: {
      const FluxSet flux = kfvs_split_fluxes_1d(b.f, disc_.v1);
      MacroState source;
      if (forced) source = forced::macro_source(disc_.x1, b.t, eb);
      out.macro = macro_update_1d(a.macro, b.macro, flux, eb, disc_.x1, dt, k,
                                  forced ? &source : nullptr);
      const ElectricField e_new = solve_poisson(out.macro.rho, disc_.x1, cfg_.poisson_sign);
      const Moments1D target = as_moments(out.macro.rho, out.macro.j1, recover_kappa(out.macro, e_new));
      out.f = lomac_truncate(star, target, disc_.basis, plain_eps(true), cfg_.trunc_mode);
      return out;
    }
  }
  out.macro = kinetic_macro(out, disc_, cfg_.poisson_sign);
  return out;
}

Level Solver::update_2d(const Level& a, const Level& b, StageCoefficients k, double dt) const {
  const Moments2D mb = ht_moments(b.g, disc_.v1, disc_.v2);
  const ElectricField eb = solve_poisson(mb.rho, disc_.x1, disc_.x2, cfg_.poisson_sign);
  const TransportGrids grids{disc_.x1, disc_.x2, disc_.v1, disc_.v2};

  // b enters through the self block of the transport tensor so it shares
  // frames with its derivatives.
  HTTensor star = ht_transport_terms(b.g, eb, grids, k.c * dt, k.b);
  if (k.a != 0.0) star = ht_add(ht_scaled(a.g, k.a), star);

  Level out;
  out.t = b.t + dt;
  if (cfg_.variant == Variant::nonconservative) {
    out.g = ht_truncate(star, plain_eps(false), cfg_.trunc_mode);
    out.macro = kinetic_macro(out, disc_, cfg_.poisson_sign);
    return out;
  }

  const Moments2D m_star = ht_moments(star, disc_.v1, disc_.v2);
  const HTTensor f2 = ht_add(star, ht_scaled(ht_build_f1(m_star, disc_.basis4), -1.0));
  const HTTensor f2t =
      ht_weighted_truncate(f2, disc_.v1.w, disc_.v2.w, plain_eps(true), cfg_.trunc_mode);

  Moments2D target = m_star;
  if (cfg_.variant == Variant::lomac) {
    const FluxSet flux = kfvs_split_fluxes_2d(b.g, disc_.v1, disc_.v2);
    out.macro = macro_update_2d(a.macro, b.macro, flux, eb, disc_.x1, disc_.x2, dt, k);
    const ElectricField e_new = solve_poisson(out.macro.rho, disc_.x1, disc_.x2, cfg_.poisson_sign);
    target = Moments2D{out.macro.rho, out.macro.j1, out.macro.j2, recover_kappa(out.macro, e_new)};
  }
  out.g = assemble_2d(target, f2t);
  if (cfg_.variant != Variant::lomac) out.macro = kinetic_macro(out, disc_, cfg_.poisson_sign);
  return out;
}

HTTensor Solver::assemble_2d(const Moments2D& target, const HTTensor& f2t) const {
  // f1(target) + (I - P) f2t, folded into a single rank-4 correction.
  if (f2t.r12() == 0 || f2t.r34() == 0) return ht_build_f1(target, disc_.basis4);
  const Moments2D residual = ht_moments(f2t, disc_.v1, disc_.v2);
  return ht_add(f2t, ht_build_f1(minus(target, residual), disc_.basis4));
}

void Solver::check_rank(const Level& level) const {
  long long worst = 0;
  if (cfg_.dims == 1) {
    worst = level.f.rank();
  } else {
    for (auto r : level.g.ranks()) worst = std::max<long long>(worst, r);
  }
  if (worst > static_cast<long long>(cfg_.rank_cap))
    throw RankError("rank " + std::to_string(worst) + " exceeds the cap of " +
                    std::to_string(cfg_.rank_cap) + " at t = " + std::to_string(level.t) +
                    " (step " + std::to_string(history_.step + 1) + ")");
}

DiagnosticsRow Solver::diagnostics() const {
  const Level& now = current();
  DiagnosticsRow row;
  row.t = now.t;
  if (cfg_.dims == 1) {
    const Moments1D m = moments(now.f, disc_.v1);
    const ElectricField e = solve_poisson(m.rho, disc_.x1, cfg_.poisson_sign);
    const double h = disc_.x1.h;
    row.ranks = {static_cast<long long>(now.f.rank())};
    row.mass = h * m.rho.sum();
    row.momentum = {h * m.j.sum()};
    row.efield_energy = field_energy(e, disc_.x1);
    row.energy = h * m.kappa.sum() + row.efield_energy;
  } else {
    const Moments2D m = ht_moments(now.g, disc_.v1, disc_.v2);
    const ElectricField e = solve_poisson(m.rho, disc_.x1, disc_.x2, cfg_.poisson_sign);
    const double area = disc_.x1.h * disc_.x2.h;
    for (auto r : now.g.ranks()) row.ranks.push_back(static_cast<long long>(r));
    row.mass = area * m.rho.sum();
    row.momentum = {area * m.j1.sum(), area * m.j2.sum()};
    row.efield_energy = field_energy(e, disc_.x1, disc_.x2);
    row.energy = area * m.kappa.sum() + row.efield_energy;
  }
  return row;
}

DiagnosticsSeries run(Solver& solver, const RunHooks& hooks) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };
  DiagnosticsSeries series;
  series.dims = solver.config().dims;
  auto record = [&] {
    DiagnosticsRow row = solver.diagnostics();
    row.wall_ms = elapsed_ms();
    series.rows.push_back(std::move(row));
  };
  record();
  std::size_t since_output = 0;
  while (!solver.finished()) {
    solver.step();
    if (hooks.on_step) hooks.on_step(solver);
    if (++since_output == solver.config().output_every || solver.finished()) {
      record();
      since_output = 0;
    }
  }
  return series;
}

DiagnosticsSeries run(const SolverConfig& cfg, const RunHooks& hooks) {
  Solver solver(cfg);
  return run(solver, hooks);
}

void tune_allocator() {
#ifdef __GLIBC__
  // Frames are reallocated every step; keep them out of mmap so the kernel
  // is not asked to zero fresh pages each time.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

}  // namespace lomac
