#include "lomac/projection.hpp"

#include "lomac/errors.hpp"
#include "lomac/kernels.hpp"

#include <cmath>

namespace lomac {

namespace {

Vector contract(const Matrix& factors, const Vector& p) {
  Vector out(factors.cols());
  kernels::active().contract(factors.data(), static_cast<std::size_t>(factors.rows()),
                             static_cast<std::size_t>(factors.cols()), p.data(), out.data());
  return out;
}

}  // namespace

ProjectionBasis make_projection_basis(const VelocityGrid& grid) {
  ProjectionBasis b;
  b.grid = grid;
  const Vector& v = grid.nodes;
  const Vector ones = Vector::Ones(v.size());
  const Vector v2 = v.cwiseProduct(v);
  b.norm2_one = weighted_inner(ones, ones, grid);
  b.c = weighted_inner(ones, v2, grid) / b.norm2_one;
  const Vector q = v2 - b.c * ones;
  b.norm2_v = weighted_inner(v, v, grid);
  b.norm2_q = weighted_inner(q, q, grid);
  b.scaled_one = grid.w_point;
  b.scaled_v = grid.w_point.cwiseProduct(v);
  b.scaled_q = grid.w_point.cwiseProduct(q);
  return b;
}

Moments1D moments(const LowRankMatrix& f, const VelocityGrid& grid) {
  if (f.nv() != static_cast<Eigen::Index>(grid.n))
    throw DimensionError("moments: velocity factor length does not match grid");
  const Vector& v = grid.nodes;
  const Vector p0 = Vector::Constant(v.size(), grid.h);
  const Vector p1 = grid.h * v;
  const Vector p2 = 0.5 * grid.h * v.cwiseProduct(v);
  Moments1D m;
  if (f.rank() == 0) {
    m.rho = m.j = m.kappa = Vector::Zero(f.nx());
    return m;
  }
  m.rho = f.x * f.coef.cwiseProduct(contract(f.v, p0));
  m.j = f.x * f.coef.cwiseProduct(contract(f.v, p1));
  m.kappa = f.x * f.coef.cwiseProduct(contract(f.v, p2));
  return m;
}

LowRankMatrix build_f1(const Moments1D& m, const ProjectionBasis& basis) {
  const Eigen::Index nx = m.rho.size();
  if (m.j.size() != nx || m.kappa.size() != nx)
    throw DimensionError("build_f1: moment arrays differ in length");
  LowRankMatrix f1;
  f1.coef = Vector::Ones(3);
  f1.x.resize(nx, 3);
  f1.x.col(0) = m.rho / basis.norm2_one;
  f1.x.col(1) = m.j / basis.norm2_v;
  f1.x.col(2) = (2.0 * m.kappa - basis.c * m.rho) / basis.norm2_q;
  f1.v.resize(basis.scaled_one.size(), 3);
  f1.v.col(0) = basis.scaled_one;
  f1.v.col(1) = basis.scaled_v;
  f1.v.col(2) = basis.scaled_q;
  f1.canonical = false;
  return f1;
}

Decomposition conservative_decompose(const LowRankMatrix& f, const ProjectionBasis& basis) {
  Decomposition d;
  d.f1 = build_f1(moments(f, basis.grid), basis);
  d.f2 = recompress(add(f, scaled(d.f1, -1.0)));
  return d;
}

LowRankMatrix conservative_truncate(const LowRankMatrix& f, const ProjectionBasis& basis,
                                    double eps, TruncationMode mode) {
  const Moments1D m = moments(f, basis.grid);
  return lomac_truncate(f, m, basis, eps, mode);
}

LowRankMatrix lomac_truncate(const LowRankMatrix& f, const Moments1D& target,
                             const ProjectionBasis& basis, double eps, TruncationMode mode) {
  const Moments1D own = moments(f, basis.grid);
  const LowRankMatrix f2 = add(f, scaled(build_f1(own, basis), -1.0));
  const LowRankMatrix f2t = weighted_truncate(f2, basis.grid.w, eps, mode);
  if (f2t.rank() == 0) return build_f1(target, basis);
  // Truncation leaves round-off moments in f2t; fold them into the
  // moment-carrying part so the sum hits the target exactly.
  const Moments1D residual = moments(f2t, basis.grid);
  const Moments1D fix{target.rho - residual.rho, target.j - residual.j,
                      target.kappa - residual.kappa};
  return add(build_f1(fix, basis), f2t);
}

}  // namespace lomac
