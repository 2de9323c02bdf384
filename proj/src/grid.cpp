#include "lomac/grid.hpp"

#include "lomac/errors.hpp"

#include <cmath>
#include <string>

namespace lomac {

namespace {

void check_points(std::size_t n, GridCheck check, const char* what) {
  const std::size_t min_points = check == GridCheck::strict ? kMinGridPoints : 2;
  if (n < min_points)
    throw SizingError(std::string(what) + " grid needs at least " + std::to_string(min_points) +
                      " points, got " + std::to_string(n));
}

}  // namespace

Vector SpatialGrid::nodes() const {
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = node(i);
  return x;
}

SpatialGrid make_spatial_grid(std::size_t n, double x_min, double x_max, GridCheck check) {
  check_points(n, check, "spatial");
  if (!(x_max > x_min)) throw DomainError("spatial grid needs x_max > x_min");
  SpatialGrid g;
  g.n = n;
  g.x_min = x_min;
  g.x_max = x_max;
  g.h = (x_max - x_min) / static_cast<double>(n);
  g.periodic = true;
  return g;
}

double WeightFunction::operator()(double v) const { return std::exp(-v * v / beta); }

double VelocityGrid::inner(const Vector& f, const Vector& g) const {
  if (f.size() != g.size() || f.size() != static_cast<Eigen::Index>(n))
    throw DimensionError("velocity inner product: length mismatch");
  return h * f.dot(g);
}

VelocityGrid make_velocity_grid(std::size_t n, double v_max, WeightFunction weight,
                                GridCheck check) {
  check_points(n, check, "velocity");
  if (!(v_max > 0.0)) throw DomainError("velocity grid needs v_max > 0");
  if (!(weight.beta > 0.0)) throw DomainError("weight function needs beta > 0");
  VelocityGrid g;
  g.n = n;
  g.v_max = v_max;
  g.h = 2.0 * v_max / static_cast<double>(n - 1);
  g.weight = weight;
  const auto m = static_cast<Eigen::Index>(n);
  g.nodes.resize(m);
  g.w.resize(m);
  g.w_point.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    // Build from both ends so the grid is exactly symmetric.
    const Eigen::Index mirror = m - 1 - j;
    const double v = j <= mirror ? -v_max + static_cast<double>(j) * g.h
                                 : -g.nodes[mirror];
    g.nodes[j] = v;
  }
  if (m % 2 == 1) g.nodes[m / 2] = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    g.w_point[j] = weight(g.nodes[j]);
    g.w[j] = g.w_point[j] * g.h;
  }
  return g;
}

double weighted_inner(const Vector& f, const Vector& g, const VelocityGrid& grid) {
  if (f.size() != g.size() || f.size() != grid.w.size())
    throw DimensionError("weighted inner product: length mismatch");
  return f.cwiseProduct(grid.w).dot(g);
}

}  // namespace lomac
