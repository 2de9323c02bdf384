#pragma once

#include "lomac/grid.hpp"

#include <span>
#include <vector>

namespace lomac {

// f = sum_l coef[l] * x.col(l) (outer) v.col(l), an N_x x N_v matrix held in
// factored form. When `canonical` is set the factor columns are orthonormal
// in the plain Euclidean product and coef is nonincreasing and nonnegative.
struct LowRankMatrix {
  Vector coef;
  Matrix x;
  Matrix v;
  bool canonical = false;

  static LowRankMatrix zero(Eigen::Index nx, Eigen::Index nv);
  // Single separable term a (outer) b.
  static LowRankMatrix outer(const Vector& a, const Vector& b, double c = 1.0);

  Eigen::Index rank() const { return coef.size(); }
  Eigen::Index nx() const { return x.rows(); }
  Eigen::Index nv() const { return v.rows(); }

  Matrix dense() const;
};

enum class TruncationMode { absolute, relative };

// Exact concatenation of the terms. Rank adds up; result is not canonical.
LowRankMatrix add(std::span<const LowRankMatrix> terms);
LowRankMatrix add(const LowRankMatrix& a, const LowRankMatrix& b);

// alpha * f, by scaling the coefficients.
LowRankMatrix scaled(const LowRankMatrix& f, double alpha);

// QR of both factor blocks followed by an SVD of the small core. Singular
// values <= drop_tol are discarded.
LowRankMatrix recompress(const LowRankMatrix& f, double drop_tol = 0.0);

// Smallest rank whose discarded singular-value tail sqrt(sum sigma_k^2) is
// <= eps (absolute), or <= eps * ||f||_F (relative).
LowRankMatrix truncate(const LowRankMatrix& f, double eps,
                       TruncationMode mode = TruncationMode::absolute);

// sqrt(w) * truncate(f / sqrt(w), eps), acting on the v-factors only.
LowRankMatrix weighted_truncate(const LowRankMatrix& f, const Vector& w, double eps,
                                TruncationMode mode = TruncationMode::absolute);

namespace detail {

struct ThinQr {
  Matrix q;
  Matrix r;
};

// Thin Householder QR, q has min(rows, cols) orthonormal columns.
ThinQr thin_qr(const Matrix& a);

// Number of leading singular values to keep so that the tail norm <= tol.
Eigen::Index rank_for_tail(const Vector& sigma, double tol);

// Multiply every column of m element-wise by s.
void scale_rows(Matrix& m, const Vector& s);

}  // namespace detail

}  // namespace lomac
