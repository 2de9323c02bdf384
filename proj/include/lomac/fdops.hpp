#pragma once

#include "lomac/grid.hpp"

#include <array>
#include <string_view>

namespace lomac {

// plus: upwind for positive transport speed (left-biased stencil).
enum class Upwind { plus, minus };

// Ghost-value policy outside the array.
enum class Boundary { periodic, zero };

Boundary parse_boundary(std::string_view name);

// Fifth-order linear upwind reconstruction weights. The plus stencil acts on
// offsets j-2..j+2 of interface j+1/2, the minus stencil on j-1..j+3.
inline constexpr std::array<double, 5> kPlusStencil{1.0 / 30.0, -13.0 / 60.0, 47.0 / 60.0,
                                                    9.0 / 20.0, -1.0 / 20.0};
inline constexpr std::array<double, 5> kMinusStencil{-1.0 / 20.0, 9.0 / 20.0, 47.0 / 60.0,
                                                     -13.0 / 60.0, 1.0 / 30.0};

// Interface values for a cell array of length N. The result has N+1
// entries: entry k is the flux at the left face of cell k and entry N the
// right face of the last cell. For periodic data entries 0 and N coincide.
Vector reconstruct_interface(const Vector& cells, Upwind dir, Boundary boundary);

// (F[k+1] - F[k]) / h for an interface array of length N+1.
Vector flux_difference(const Vector& interfaces, double h);

// Conservative upwind first derivative: flux_difference of the reconstruction.
Vector upwind_derivative(const Vector& u, Upwind dir, double h, Boundary boundary);

// Column-wise upwind derivative of a block of vectors.
Matrix upwind_derivative_columns(const Matrix& u, Upwind dir, double h, Boundary boundary);

// Derivatives of fields flattened as index i1 + n1 * i2 (x1 fastest), taken
// along axis 0 (x1) or axis 1 (x2). Each column of `u` is one field.
Matrix upwind_derivative_2d(const Matrix& u, std::size_t n1, std::size_t n2, int axis, Upwind dir,
                            double h, Boundary boundary);

}  // namespace lomac
