#pragma once

#include "lomac/grid.hpp"

namespace lomac {

// Electrostatic field on a periodic grid. In 1D only `e1` is populated; in 2D
// fields are flattened as i1 + n1 * i2.
struct ElectricField {
  int dims = 1;
  Vector phi;
  Vector e1;
  Vector e2;

  // Largest |E_component|, component 1 or 2.
  double max_abs(int component) const;
};

// -lap(phi) = rho - mean(rho), E = -sign * grad(phi), evaluated spectrally.
// The k = 0 and Nyquist modes of E are zero.
ElectricField solve_poisson(const Vector& rho, const SpatialGrid& grid, int sign = 1);
ElectricField solve_poisson(const Vector& rho, const SpatialGrid& g1, const SpatialGrid& g2,
                            int sign = 1);

// 1/2 * sum |E|^2 * cell volume.
double field_energy(const ElectricField& field, const SpatialGrid& grid);
double field_energy(const ElectricField& field, const SpatialGrid& g1, const SpatialGrid& g2);

// Spectral first derivative of a periodic 1D array, Nyquist mode dropped.
Vector spectral_derivative(const Vector& u, const SpatialGrid& grid);

}  // namespace lomac
