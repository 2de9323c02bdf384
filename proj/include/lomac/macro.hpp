#pragma once

#include "lomac/field.hpp"
#include "lomac/grid.hpp"
#include "lomac/ht.hpp"
#include "lomac/lowrank.hpp"

#include <array>
#include <vector>

namespace lomac {

// Conserved densities on the spatial grid. In 1D `j2` is empty.
struct MacroState {
  int dims = 1;
  Vector rho;
  Vector j1;
  Vector j2;
  Vector e;

  Eigen::Index size() const { return rho.size(); }
  static MacroState zero(int dims, Eigen::Index n);
};

// Split moment fluxes. plus[d][k] / minus[d][k] hold the cell flux of
// conserved variable k (rho, j1, [j2,] e) along direction d.
struct FluxSet {
  int dims = 1;
  std::array<std::vector<Vector>, 2> plus;
  std::array<std::vector<Vector>, 2> minus;

  // F+ + F- for variable k along direction d.
  Vector unsplit(int d, int k) const;
};

FluxSet kfvs_split_fluxes_1d(const LowRankMatrix& f, const VelocityGrid& grid);
FluxSet kfvs_split_fluxes_2d(const HTTensor& f, const VelocityGrid& g1, const VelocityGrid& g2);

// out = a * A + b * B + c * dt * (-div F(B) + S(B)); the multistep scheme is
// (1/4, 3/4, 3/2), Heun stages use other triples.
struct StageCoefficients {
  double a = 0.25;
  double b = 0.75;
  double c = 1.5;
};

// S = (0, rho E, 0) from B plus an optional extra source.
MacroState macro_update_1d(const MacroState& a_state, const MacroState& b_state,
                           const FluxSet& flux, const ElectricField& field,
                           const SpatialGrid& grid, double dt, StageCoefficients k,
                           const MacroState* extra_source = nullptr);

MacroState macro_step_1d(const MacroState& u_n, const MacroState& u_nm2, const FluxSet& flux,
                         const ElectricField& field, const SpatialGrid& grid, double dt,
                         const MacroState* extra_source = nullptr);

MacroState macro_update_2d(const MacroState& a_state, const MacroState& b_state,
                           const FluxSet& flux, const ElectricField& field,
                           const SpatialGrid& g1, const SpatialGrid& g2, double dt,
                           StageCoefficients k);

MacroState macro_step_2d(const MacroState& u_n, const MacroState& u_nm2, const FluxSet& flux,
                         const ElectricField& field, const SpatialGrid& g1,
                         const SpatialGrid& g2, double dt);

// kappa = e - |E|^2 / 2.
Vector recover_kappa(const MacroState& u, const ElectricField& field);

// Macro state whose energy is kappa + |E|^2 / 2.
MacroState macro_from_moments(const Vector& rho, const Vector& j1, const Vector& j2,
                              const Vector& kappa, const ElectricField& field);

}  // namespace lomac
