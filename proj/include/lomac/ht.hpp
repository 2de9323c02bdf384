#pragma once

#include "lomac/field.hpp"
#include "lomac/grid.hpp"
#include "lomac/lowrank.hpp"

#include <array>
#include <span>

namespace lomac {

// Fourth-order tensor f(x1, x2, v1, v2) in hierarchical Tucker format on the
// fixed tree {(1,2), 3, 4}:
//
//   f = sum_{a,b} root(a, b) u12(:, a) (outer) U34(:, b),
//   U34(:, b) = sum_{p,q} b34(p + r3 * q, b) u3(:, p) (outer) u4(:, q).
//
// The (x1, x2) frame is a full grid flattened as i1 + n1 * i2. Dense
// velocity index is j3 + nv1 * j4.
struct HTTensor {
  Matrix u12;
  Matrix root;
  Matrix b34;
  Matrix u3;
  Matrix u4;
  bool canonical = false;

  // {r12, r34, r3, r4}
  std::array<Eigen::Index, 4> ranks() const;
  Eigen::Index r12() const { return u12.cols(); }
  Eigen::Index r34() const { return b34.cols(); }
  Eigen::Index r3() const { return u3.cols(); }
  Eigen::Index r4() const { return u4.cols(); }
  Eigen::Index n12() const { return u12.rows(); }
  Eigen::Index nv1() const { return u3.rows(); }
  Eigen::Index nv2() const { return u4.rows(); }

  // Number of stored scalars across all frames and transfer tensors.
  Eigen::Index element_count() const;

  // n12 x (nv1 * nv2) matricization of the full tensor.
  Matrix dense() const;

  // Transfer slice for column b of the (3,4) node, an r3 x r4 matrix.
  Eigen::Map<const Matrix> slice(Eigen::Index b) const;

  static HTTensor zero(Eigen::Index n12, Eigen::Index nv1, Eigen::Index nv2);
  // c * a12 (outer) a3 (outer) a4.
  static HTTensor product(const Vector& a12, const Vector& a3, const Vector& a4, double c = 1.0);
};

HTTensor ht_add(std::span<const HTTensor> terms);
HTTensor ht_add(const HTTensor& a, const HTTensor& b);
HTTensor ht_scaled(const HTTensor& f, double alpha);

// Leaves-to-root orthogonalization; the dense tensor is unchanged.
HTTensor ht_orthogonalize(const HTTensor& f);

// Hierarchical SVD truncation. Each of the three truncated edges (root,
// node 3, node 4) gets tolerance eps / sqrt(3), so the Frobenius error of
// the full tensor is <= eps.
HTTensor ht_truncate(const HTTensor& f, double eps,
                     TruncationMode mode = TruncationMode::absolute);

// sqrt(w1 w2) * ht_truncate(f / sqrt(w1 w2), eps), acting on the leaves.
HTTensor ht_weighted_truncate(const HTTensor& f, const Vector& w1, const Vector& w2, double eps,
                              TruncationMode mode = TruncationMode::absolute);

// sum over velocities of f * (p3 (outer) p4), returned on the spatial grid.
// p3/p4 carry any quadrature factors.
Vector ht_contract(const HTTensor& f, const Vector& p3, const Vector& p4);

struct Moments2D {
  Vector rho;
  Vector j1;
  Vector j2;
  Vector kappa;
};

Moments2D ht_moments(const HTTensor& f, const VelocityGrid& g1, const VelocityGrid& g2);

// Orthonormal basis of span{1, v1, v2, v1^2 + v2^2} under the w (x) w
// product, in the leaf/transfer form used to assemble the moment-carrying
// part of a distribution.
struct ProjectionBasis4D {
  VelocityGrid grid;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  // Leaf frame {w/c1, w v/c2, w (v^2 - c)/c3}, shared by nodes 3 and 4.
  Matrix leaf;
  // 9 x 4 transfer tensor, row index l3 + 3 * l4.
  Matrix b34;
};

// Velocity grids in both directions must coincide.
ProjectionBasis4D make_projection_basis_4d(const VelocityGrid& g1, const VelocityGrid& g2);

HTTensor ht_build_f1(const Moments2D& m, const ProjectionBasis4D& basis);

// f - P(f): the zero-moment remainder.
HTTensor ht_project_complement(const HTTensor& f, const ProjectionBasis4D& basis);

struct TransportGrids {
  SpatialGrid x1;
  SpatialGrid x2;
  VelocityGrid v1;
  VelocityGrid v2;
};

// -(v1 d/dx1 + v2 d/dx2 + E1 d/dv1 + E2 d/dv2) f with upwind splitting of each
// term, as one HT tensor with eight blocks scaled by transport_coeff. When
// self_coeff is nonzero a ninth block self_coeff * f is folded in, sharing
// the unmodified frames.
HTTensor ht_transport_terms(const HTTensor& f, const ElectricField& field,
                            const TransportGrids& grids, double transport_coeff = 1.0,
                            double self_coeff = 0.0);

}  // namespace lomac
