#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace lomac {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Minimum number of points any stencil-bearing grid must carry.
inline constexpr std::size_t kMinGridPoints = 8;

enum class GridCheck { strict, relaxed };

// Uniform 1D grid. Periodic grids store x_min and exclude x_max (the last
// node's periodic image).
struct SpatialGrid {
  std::size_t n = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  double h = 0.0;
  bool periodic = true;

  double node(std::size_t i) const { return x_min + static_cast<double>(i) * h; }
  double length() const { return x_max - x_min; }
  Vector nodes() const;
};

SpatialGrid make_spatial_grid(std::size_t n, double x_min, double x_max,
                              GridCheck check = GridCheck::strict);

// w(v) = exp(-v^2 / beta).
struct WeightFunction {
  double beta = 2.0;

  double operator()(double v) const;
};

// Endpoint-inclusive velocity grid on [-v_max, v_max].
struct VelocityGrid {
  std::size_t n = 0;
  double v_max = 0.0;
  double h = 0.0;
  WeightFunction weight;
  Vector nodes;
  // Weighted quadrature vector, w_j = w(v_j) * h.
  Vector w;
  // Point values of the weight function, w(v_j).
  Vector w_point;

  // Plain quadrature <f, g> = h * sum_j f_j g_j.
  double inner(const Vector& f, const Vector& g) const;
};

VelocityGrid make_velocity_grid(std::size_t n, double v_max, WeightFunction weight = {},
                                GridCheck check = GridCheck::strict);

// <f, g>_w = sum_j f_j g_j w_j.
double weighted_inner(const Vector& f, const Vector& g, const VelocityGrid& grid);

}  // namespace lomac
