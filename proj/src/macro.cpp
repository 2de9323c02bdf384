#include "lomac/macro.hpp"

#include "lomac/errors.hpp"
#include "lomac/fdops.hpp"
#include "lomac/kernels.hpp"

namespace lomac {

namespace {

Vector contract(const Matrix& factors, const Vector& p) {
  Vector out(factors.cols());
  kernels::active().contract(factors.data(), static_cast<std::size_t>(factors.rows()),
                             static_cast<std::size_t>(factors.cols()), p.data(), out.data());
  return out;
}

Vector lowrank_moment(const LowRankMatrix& f, const Vector& p) {
  if (f.rank() == 0) return Vector::Zero(f.nx());
  return f.x * f.coef.cwiseProduct(contract(f.v, p));
}

Vector signed_part(const Vector& v, int side) {
  return side == 0 ? Vector(v.cwiseMax(0.0)) : Vector(v.cwiseMin(0.0));
}

int variable_count(int dims) { return dims == 1 ? 3 : 4; }

std::vector<Vector*> variables(MacroState& u) {
  if (u.dims == 1) return {&u.rho, &u.j1, &u.e};
  return {&u.rho, &u.j1, &u.j2, &u.e};
}

std::vector<const Vector*> variables(const MacroState& u) {
  if (u.dims == 1) return {&u.rho, &u.j1, &u.e};
  return {&u.rho, &u.j1, &u.j2, &u.e};
}

void check_state(const MacroState& u, int dims, Eigen::Index n, const char* what) {
  if (u.dims != dims) throw DimensionError(std::string(what) + ": dimensionality mismatch");
  for (const Vector* v : variables(u))
    if (v->size() != n) throw DimensionError(std::string(what) + ": field length mismatch");
}

void check_flux(const FluxSet& flux, int dims, Eigen::Index n) {
  if (flux.dims != dims) throw DimensionError("macro update: flux dimensionality mismatch");
  for (int d = 0; d < dims; ++d) {
    if (static_cast<int>(flux.plus[d].size()) != variable_count(dims) ||
        static_cast<int>(flux.minus[d].size()) != variable_count(dims))
      throw DimensionError("macro update: flux variable count mismatch");
    for (int k = 0; k < variable_count(dims); ++k)
      if (flux.plus[d][k].size() != n || flux.minus[d][k].size() != n)
        throw DimensionError("macro update: flux length mismatch");
  }
}

// Combines a, b and the rate into the stage result, variable by variable.
MacroState combine(const MacroState& a_state, const MacroState& b_state,
                   const std::vector<Vector>& rate, double dt, StageCoefficients k) {
  MacroState out = b_state;
  auto outs = variables(out);
  const auto as = variables(a_state);
  const auto bs = variables(b_state);
  for (std::size_t i = 0; i < outs.size(); ++i)
    *outs[i] = k.a * *as[i] + k.b * *bs[i] + (k.c * dt) * rate[i];
  return out;
}

}  // namespace

MacroState MacroState::zero(int dims, Eigen::Index n) {
  MacroState u;
  u.dims = dims;
  u.rho = u.j1 = u.e = Vector::Zero(n);
  if (dims == 2) u.j2 = Vector::Zero(n);
  return u;
}

Vector FluxSet::unsplit(int d, int k) const { return plus[d][k] + minus[d][k]; }

FluxSet kfvs_split_fluxes_1d(const LowRankMatrix& f, const VelocityGrid& grid) {
  if (f.nv() != static_cast<Eigen::Index>(grid.n))
    throw DimensionError("kfvs_split_fluxes_1d: velocity grid mismatch");
  const Vector& v = grid.nodes;
  FluxSet flux;
  flux.dims = 1;
  for (int side = 0; side < 2; ++side) {
    const Vector vs = signed_part(v, side);
    const Vector vs2 = vs.cwiseProduct(vs);
    std::vector<Vector> out{lowrank_moment(f, grid.h * vs), lowrank_moment(f, grid.h * vs2),
                            lowrank_moment(f, 0.5 * grid.h * vs2.cwiseProduct(vs))};
    (side == 0 ? flux.plus[0] : flux.minus[0]) = std::move(out);
  }
  return flux;
}

FluxSet kfvs_split_fluxes_2d(const HTTensor& f, const VelocityGrid& g1, const VelocityGrid& g2) {
  if (f.nv1() != static_cast<Eigen::Index>(g1.n) || f.nv2() != static_cast<Eigen::Index>(g2.n))
    throw DimensionError("kfvs_split_fluxes_2d: velocity grid mismatch");
  FluxSet flux;
  flux.dims = 2;
  const Vector one1 = Vector::Constant(g1.nodes.size(), g1.h);
  const Vector one2 = Vector::Constant(g2.nodes.size(), g2.h);
  const Vector lin1 = g1.h * g1.nodes;
  const Vector lin2 = g2.h * g2.nodes;
  const Vector sq1 = g1.nodes.cwiseProduct(g1.nodes);
  const Vector sq2 = g2.nodes.cwiseProduct(g2.nodes);
  for (int side = 0; side < 2; ++side) {
    const Vector s1 = signed_part(g1.nodes, side);
    const Vector s2 = signed_part(g2.nodes, side);
    const Vector p1 = g1.h * s1;
    const Vector p2 = g2.h * s2;
    std::vector<Vector> x1{
        ht_contract(f, p1, one2), ht_contract(f, g1.h * s1.cwiseProduct(s1), one2),
        ht_contract(f, p1, lin2),
        0.5 * (ht_contract(f, p1.cwiseProduct(sq1), one2) +
               ht_contract(f, p1, g2.h * sq2))};
    std::vector<Vector> x2{
        ht_contract(f, one1, p2), ht_contract(f, lin1, p2),
        ht_contract(f, one1, g2.h * s2.cwiseProduct(s2)),
        0.5 * (ht_contract(f, g1.h * sq1, p2) +
               ht_contract(f, one1, p2.cwiseProduct(sq2)))};
    (side == 0 ? flux.plus : flux.minus)[0] = std::move(x1);
    (side == 0 ? flux.plus : flux.minus)[1] = std::move(x2);
  }
  return flux;
}

MacroState macro_update_1d(const MacroState& a_state, const MacroState& b_state,
                           const FluxSet& flux, const ElectricField& field,
                           const SpatialGrid& grid, double dt, StageCoefficients k,
                           const MacroState* extra_source) {
  const auto n = static_cast<Eigen::Index>(grid.n);
  check_state(a_state, 1, n, "macro_update_1d");
  check_state(b_state, 1, n, "macro_update_1d");
  check_flux(flux, 1, n);
  if (field.e1.size() != n) throw DimensionError("macro_update_1d: field length mismatch");
  if (extra_source) check_state(*extra_source, 1, n, "macro_update_1d source");

  const Boundary bc = grid.periodic ? Boundary::periodic : Boundary::zero;
  std::vector<Vector> rate(3);
  for (int v = 0; v < 3; ++v) {
    const Vector hat = reconstruct_interface(flux.plus[0][v], Upwind::plus, bc) +
                       reconstruct_interface(flux.minus[0][v], Upwind::minus, bc);
    rate[v] = -flux_difference(hat, grid.h);
  }
  rate[1] += b_state.rho.cwiseProduct(field.e1);
  if (extra_source) {
    rate[0] += extra_source->rho;
    rate[1] += extra_source->j1;
    rate[2] += extra_source->e;
  }
  return combine(a_state, b_state, rate, dt, k);
}

MacroState macro_step_1d(const MacroState& u_n, const MacroState& u_nm2, const FluxSet& flux,
                         const ElectricField& field, const SpatialGrid& grid, double dt,
                         const MacroState* extra_source) {
  return macro_update_1d(u_nm2, u_n, flux, field, grid, dt, StageCoefficients{}, extra_source);
}

MacroState macro_update_2d(const MacroState& a_state, const MacroState& b_state,
                           const FluxSet& flux, const ElectricField& field,
                           const SpatialGrid& g1, const SpatialGrid& g2, double dt,
                           StageCoefficients k) {
  const auto n = static_cast<Eigen::Index>(g1.n * g2.n);
  check_state(a_state, 2, n, "macro_update_2d");
  check_state(b_state, 2, n, "macro_update_2d");
  check_flux(flux, 2, n);
  if (field.e1.size() != n || field.e2.size() != n)
    throw DimensionError("macro_update_2d: field length mismatch");

  const Boundary bc1 = g1.periodic ? Boundary::periodic : Boundary::zero;
  const Boundary bc2 = g2.periodic ? Boundary::periodic : Boundary::zero;
  std::vector<Vector> rate(4);
  for (int v = 0; v < 4; ++v) {
    // The x1 and x2 flux differences of one variable, as a 2-column block each.
    Matrix plus(n, 2), minus(n, 2);
    plus << flux.plus[0][v], flux.plus[1][v];
    minus << flux.minus[0][v], flux.minus[1][v];
    const Matrix d1 = upwind_derivative_2d(plus.col(0), g1.n, g2.n, 0, Upwind::plus, g1.h, bc1) +
                      upwind_derivative_2d(minus.col(0), g1.n, g2.n, 0, Upwind::minus, g1.h, bc1);
    const Matrix d2 = upwind_derivative_2d(plus.col(1), g1.n, g2.n, 1, Upwind::plus, g2.h, bc2) +
                      upwind_derivative_2d(minus.col(1), g1.n, g2.n, 1, Upwind::minus, g2.h, bc2);
    rate[v] = -(d1.col(0) + d2.col(0));
  }
  rate[1] += b_state.rho.cwiseProduct(field.e1);
  rate[2] += b_state.rho.cwiseProduct(field.e2);
  return combine(a_state, b_state, rate, dt, k);
}

MacroState macro_step_2d(const MacroState& u_n, const MacroState& u_nm2, const FluxSet& flux,
                         const ElectricField& field, const SpatialGrid& g1,
                         const SpatialGrid& g2, double dt) {
  return macro_update_2d(u_nm2, u_n, flux, field, g1, g2, dt, StageCoefficients{});
}

Vector recover_kappa(const MacroState& u, const ElectricField& field) {
  if (field.e1.size() != u.e.size()) throw DimensionError("recover_kappa: size mismatch");
  Vector k = u.e - 0.5 * field.e1.cwiseProduct(field.e1);
  if (u.dims == 2) k -= 0.5 * field.e2.cwiseProduct(field.e2);
  return k;
}

MacroState macro_from_moments(const Vector& rho, const Vector& j1, const Vector& j2,
                              const Vector& kappa, const ElectricField& field) {
  MacroState u;
  u.dims = field.dims;
  u.rho = rho;
  u.j1 = j1;
  u.e = kappa + 0.5 * field.e1.cwiseProduct(field.e1);
  if (u.dims == 2) {
    u.j2 = j2;
    u.e += 0.5 * field.e2.cwiseProduct(field.e2);
  }
  return u;
}

}  // namespace lomac
