#pragma once

// Shared helpers for the unit tests: seeded random factors and norms.

#include "lomac/grid.hpp"
#include "lomac/ht.hpp"
#include "lomac/lowrank.hpp"

#include <cmath>
#include <random>

namespace testing {

using lomac::Matrix;
using lomac::Vector;

class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform();
    return m;
  }
  Vector vector(Eigen::Index n) { return matrix(n, 1); }

  lomac::LowRankMatrix lowrank(Eigen::Index nx, Eigen::Index nv, Eigen::Index r) {
    lomac::LowRankMatrix f;
    f.coef = vector(r);
    f.x = matrix(nx, r);
    f.v = matrix(nv, r);
    return f;
  }

  lomac::HTTensor ht(Eigen::Index n12, Eigen::Index nv1, Eigen::Index nv2, Eigen::Index r12,
                     Eigen::Index r34, Eigen::Index r3, Eigen::Index r4) {
    lomac::HTTensor f;
    f.u12 = matrix(n12, r12);
    f.root = matrix(r12, r34);
    f.b34 = matrix(r3 * r4, r34);
    f.u3 = matrix(nv1, r3);
    f.u4 = matrix(nv2, r4);
    return f;
  }

 private:
  std::mt19937_64 gen_;
};

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Dense (n12 x nv1*nv2) tensor from HT factors by direct summation over all
// tree indices; independent of HTTensor::dense.
inline Matrix ht_dense_oracle(const lomac::HTTensor& f) {
  const Eigen::Index n3 = f.nv1(), n4 = f.nv2();
  Matrix out = Matrix::Zero(f.n12(), n3 * n4);
  for (Eigen::Index a = 0; a < f.r12(); ++a)
    for (Eigen::Index b = 0; b < f.r34(); ++b) {
      if (f.root(a, b) == 0.0) continue;
      Matrix vel = Matrix::Zero(n3, n4);
      for (Eigen::Index p = 0; p < f.r3(); ++p)
        for (Eigen::Index q = 0; q < f.r4(); ++q) {
          const double t = f.b34(p + f.r3() * q, b);
          if (t != 0.0) vel += t * f.u3.col(p) * f.u4.col(q).transpose();
        }
      const Eigen::Map<const Vector> flat(vel.data(), n3 * n4);
      out += f.root(a, b) * f.u12.col(a) * flat.transpose();
    }
  return out;
}

}  // namespace testing
