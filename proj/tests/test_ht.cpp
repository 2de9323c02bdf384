#include "lomac/errors.hpp"
#include "lomac/ht.hpp"
#include "oracles/dense_ops.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lomac;
using testing::ht_dense_oracle;

namespace {

Matrix orthonormal(testing::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  return rng.matrix(rows, cols).householderQr().householderQ() * Matrix::Identity(rows, cols);
}

// Velocity-pair vector of p(v1, v2) with index j3 + nv * j4.
template <class F>
Vector pair_field(const VelocityGrid& g, F p) {
  const Eigen::Index nv = g.nodes.size();
  Vector out(nv * nv);
  for (Eigen::Index j4 = 0; j4 < nv; ++j4)
    for (Eigen::Index j3 = 0; j3 < nv; ++j3) out[j3 + nv * j4] = p(g.nodes[j3], g.nodes[j4]);
  return out;
}

Matrix dense_moments(const Matrix& f, const VelocityGrid& g) {
  const double q = g.h * g.h;
  Matrix m(f.rows(), 4);
  m.col(0) = q * f * pair_field(g, [](double, double) { return 1.0; });
  m.col(1) = q * f * pair_field(g, [](double a, double) { return a; });
  m.col(2) = q * f * pair_field(g, [](double, double b) { return b; });
  m.col(3) = q * f * pair_field(g, [](double a, double b) { return 0.5 * (a * a + b * b); });
  return m;
}

Matrix as_matrix(const Moments2D& m) {
  Matrix out(m.rho.size(), 4);
  out << m.rho, m.j1, m.j2, m.kappa;
  return out;
}

Vector pair_weight(const VelocityGrid& g) {
  return pair_field(g, [&](double a, double b) { return g.weight(a) * g.weight(b) * g.h * g.h; });
}

// Norm with weight 1 / (w1 w2) on the velocity pair.
double weighted_norm(const Matrix& f, const Vector& w) {
  return std::sqrt((f.array().square().rowwise() / w.transpose().array()).sum());
}

// omega (x) omega times the w (x) w orthogonal projection of f / (omega (x)
// omega) onto span{1, v1, v2, v1^2 + v2^2}, by a dense Gram solve.
Matrix dense_projection(const Matrix& f, const VelocityGrid& g) {
  const Vector om = pair_field(g, [&](double a, double b) { return g.weight(a) * g.weight(b); });
  const Vector w = om * (g.h * g.h);
  Matrix p(om.size(), 4);
  p << pair_field(g, [](double, double) { return 1.0; }),
      pair_field(g, [](double a, double) { return a; }),
      pair_field(g, [](double, double b) { return b; }),
      pair_field(g, [](double a, double b) { return a * a + b * b; });
  const Matrix gram = p.transpose() * w.asDiagonal() * p;
  const Matrix rhs = (g.h * g.h) * f * p;
  const Matrix coef = gram.ldlt().solve(rhs.transpose());
  return (p * coef).transpose() * om.asDiagonal();
}

}  // namespace

TEST_CASE("ht addition") {
  testing::Rng rng(51);
  const auto a = rng.ht(64, 12, 12, 2, 2, 2, 2);
  const auto b = rng.ht(64, 12, 12, 2, 3, 2, 2);
  const HTTensor one[] = {a};
  CHECK((ht_add(one).dense() - a.dense()).norm() == 0.0);
  CHECK(ht_add(a, ht_scaled(a, -1.0)).dense().cwiseAbs().maxCoeff() < 1e-13);
  const auto s = ht_add(a, b);
  CHECK(s.r12() == 4);
  CHECK(s.r34() == 5);
  CHECK(!s.canonical);
  CHECK(testing::rel_diff(ht_dense_oracle(s), ht_dense_oracle(a) + ht_dense_oracle(b)) < 1e-14);
  CHECK(testing::rel_diff(a.dense(), ht_dense_oracle(a)) < 1e-14);
  CHECK_THROWS_AS(ht_add(a, rng.ht(64, 12, 13, 1, 1, 1, 1)), DimensionError);
  CHECK_THROWS_AS(ht_add(std::span<const HTTensor>()), DimensionError);
}

TEST_CASE("ht storage") {
  testing::Rng rng(52);
  const auto f = rng.ht(100, 20, 30, 3, 4, 5, 6);
  CHECK(f.element_count() == 100 * 3 + 3 * 4 + 5 * 6 * 4 + 20 * 5 + 30 * 6);
  CHECK(f.ranks() == std::array<Eigen::Index, 4>{3, 4, 5, 6});
  const auto p = HTTensor::product(Vector::Ones(9), Vector::Ones(10), Vector::Ones(11), 2.0);
  CHECK(p.element_count() == 9 + 1 + 1 + 10 + 11);
  CHECK((p.dense().array() - 2.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("ht orthogonalization preserves the tensor") {
  testing::Rng rng(53);
  const auto f = rng.ht(64, 12, 12, 3, 3, 2, 3);
  const auto o = ht_orthogonalize(f);
  CHECK(o.canonical);
  CHECK(testing::rel_diff(o.dense(), f.dense()) < 1e-13);
  const auto eye = [](Eigen::Index n) { return Matrix::Identity(n, n); };
  CHECK((o.u12.transpose() * o.u12 - eye(o.r12())).norm() < 1e-12);
  CHECK((o.u3.transpose() * o.u3 - eye(o.r3())).norm() < 1e-12);
  CHECK((o.u4.transpose() * o.u4 - eye(o.r4())).norm() < 1e-12);
  CHECK((o.b34.transpose() * o.b34 - eye(o.r34())).norm() < 1e-12);
}

TEST_CASE("ht truncation") {
  testing::Rng rng(54);
  SUBCASE("eps zero keeps the tensor") {
    const auto f = rng.ht(64, 16, 16, 4, 3, 3, 3);
    CHECK(testing::rel_diff(ht_truncate(f, 0.0).dense(), f.dense()) < 1e-11);
  }
  SUBCASE("rank-one product stays rank one") {
    const auto p = HTTensor::product(rng.vector(64), rng.vector(16), rng.vector(16), 3.0);
    const auto t = ht_truncate(ht_add(p, p), 1e-6);
    CHECK(t.ranks() == std::array<Eigen::Index, 4>{1, 1, 1, 1});
    CHECK(testing::rel_diff(t.dense(), 2.0 * p.dense()) < 1e-13);
  }
  SUBCASE("known spectra") {
    // Orthonormal frames, orthonormal transfer columns, diagonal root.
    HTTensor f;
    f.u12 = orthonormal(rng, 64, 6);
    f.u3 = orthonormal(rng, 16, 4);
    f.u4 = orthonormal(rng, 16, 4);
    f.b34 = orthonormal(rng, 16, 6);
    f.root = Vector({{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5}}).asDiagonal();
    const Matrix d = ht_dense_oracle(f);
    for (double eps : {0.3, 2e-2, 2e-3, 2e-5}) {
      const auto t = ht_truncate(f, eps);
      CHECK((t.dense() - d).norm() <= eps);
      // Root spectrum alone already allows dropping these terms.
      Eigen::Index needed = 6;
      double tail = 0.0;
      while (needed > 0 && tail + std::pow(10.0, -2.0 * (needed - 1)) <= eps * eps / 3) {
        tail += std::pow(10.0, -2.0 * (needed - 1));
        --needed;
      }
      CHECK(t.r12() <= needed);
    }
  }
  SUBCASE("random tensors honor the error bound") {
    for (int trial = 0; trial < 30; ++trial) {
      const auto f = rng.ht(36, 10, 12, rng.integer(1, 5), rng.integer(1, 5), rng.integer(1, 4),
                            rng.integer(1, 4));
      const Matrix d = ht_dense_oracle(f);
      const double eps = d.norm() * std::pow(10.0, rng.uniform(-4, -0.3));
      CHECK((ht_truncate(f, eps).dense() - d).norm() <= eps * (1 + 1e-12));
      const double rel = std::pow(10.0, rng.uniform(-4, -0.3));
      CHECK((ht_truncate(f, rel, TruncationMode::relative).dense() - d).norm() <=
            rel * d.norm() * (1 + 1e-12));
    }
  }
  SUBCASE("zero and invalid input") {
    const auto z = ht_truncate(HTTensor::zero(16, 8, 8), 1e-3);
    CHECK(z.dense().norm() == 0.0);
    CHECK_THROWS_AS(ht_truncate(rng.ht(16, 8, 8, 1, 1, 1, 1), -1.0), DomainError);
  }
}

TEST_CASE("ht weighted truncation") {
  testing::Rng rng(55);
  const auto f = rng.ht(49, 16, 16, 4, 4, 3, 3);
  SUBCASE("flat weights") {
    const Vector one = Vector::Ones(16);
    CHECK((ht_weighted_truncate(f, one, one, 0.05).dense() - ht_truncate(f, 0.05).dense()).norm() <
          1e-12 * f.dense().norm());
  }
  SUBCASE("eps zero") {
    const Vector w = rng.vector(16).array() + 1.5;
    CHECK(testing::rel_diff(ht_weighted_truncate(f, w, w, 0.0).dense(), f.dense()) < 1e-11);
  }
  SUBCASE("Gaussian weights bound the weighted error") {
    const auto g = make_velocity_grid(16, 5.0);
    const Vector w = pair_weight(g);
    const Matrix d = ht_dense_oracle(f);
    const double norm = weighted_norm(d, w);
    for (double rel : {1e-1, 1e-2, 1e-4}) {
      const auto t = ht_weighted_truncate(f, g.w, g.w, rel * norm);
      CHECK(weighted_norm(t.dense() - d, w) <= rel * norm * (1 + 1e-12));
    }
  }
  SUBCASE("bad weights") {
    Vector w = Vector::Ones(16);
    w[3] = 0.0;
    CHECK_THROWS_AS(ht_weighted_truncate(f, w, Vector::Ones(16), 1e-3), DomainError);
    CHECK_THROWS_AS(ht_weighted_truncate(f, Vector::Ones(15), Vector::Ones(16), 1e-3),
                    DimensionError);
  }
}

TEST_CASE("ht moments") {
  const auto g = make_velocity_grid(16, 5.0);
  testing::Rng rng(56);
  SUBCASE("zero") {
    CHECK(as_matrix(ht_moments(HTTensor::zero(64, 16, 16), g, g)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("uniform product Maxwellian") {
    const Vector m = (-0.5 * g.nodes.array().square()).exp().matrix();
    const auto mo = ht_moments(HTTensor::product(Vector::Ones(64), m, m), g, g);
    const double mass = g.h * m.sum();
    const double second = g.h * m.dot(g.nodes.cwiseProduct(g.nodes));
    CHECK((mo.rho.array() - mass * mass).abs().maxCoeff() < 1e-13);
    CHECK(mo.j1.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(mo.j2.cwiseAbs().maxCoeff() < 1e-15);
    CHECK((mo.kappa.array() - mass * second).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("random tensor against dense quadrature") {
    const auto f = rng.ht(64, 16, 16, 3, 3, 3, 3);
    CHECK(testing::rel_diff(as_matrix(ht_moments(f, g, g)), dense_moments(ht_dense_oracle(f), g)) <
          1e-12);
  }
  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(ht_moments(HTTensor::zero(4, 15, 16), g, g), DimensionError);
  }
}

TEST_CASE("2D projection basis") {
  const auto g = make_velocity_grid(24, 6.0);
  const auto b = make_projection_basis_4d(g, g);
  CHECK(b.c > 0.0);
  SUBCASE("transfer sparsity") {
    Matrix expect = Matrix::Zero(9, 4);
    expect(0, 0) = 1.0;
    expect(1, 1) = 1.0;
    expect(3, 2) = 1.0;
    expect(2, 3) = 1.0 / std::sqrt(2.0);
    expect(6, 3) = 1.0 / std::sqrt(2.0);
    CHECK(b.b34 == expect);
  }
  SUBCASE("weighted orthonormality") {
    const Vector w = pair_weight(g);
    Matrix basis(24 * 24, 4);
    for (int c = 0; c < 4; ++c) {
      Matrix block = Matrix::Zero(24, 24);
      for (int l4 = 0; l4 < 3; ++l4)
        for (int l3 = 0; l3 < 3; ++l3)
          block += b.b34(l3 + 3 * l4, c) * b.leaf.col(l3) * b.leaf.col(l4).transpose();
      basis.col(c) = Eigen::Map<const Vector>(block.data(), 24 * 24);
    }
    // <V/omega, V/omega>_w with w = omega h^2 on each pair point.
    const double q = g.h * g.h;
    const Matrix gram = q * q * basis.transpose() * w.cwiseInverse().asDiagonal() * basis;
    CHECK((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("asymmetric grids are rejected") {
    CHECK_THROWS_AS(make_projection_basis_4d(g, make_velocity_grid(25, 6.0)), DimensionError);
  }
}

TEST_CASE("2D moment-carrying part") {
  const auto g = make_velocity_grid(16, 5.0);
  const auto b = make_projection_basis_4d(g, g);
  testing::Rng rng(57);
  SUBCASE("zero moments") {
    const auto f1 = ht_build_f1({Vector::Zero(9), Vector::Zero(9), Vector::Zero(9), Vector::Zero(9)}, b);
    CHECK(f1.dense().cwiseAbs().maxCoeff() == 0.0);
    CHECK(f1.ranks() == std::array<Eigen::Index, 4>{4, 4, 3, 3});
  }
  SUBCASE("thermal kappa leaves one term") {
    const Vector rho = rng.vector(9).array() + 2.0;
    const auto f1 = ht_build_f1({rho, Vector::Zero(9), Vector::Zero(9), b.c * rho}, b);
    CHECK(f1.u12.col(3).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(f1.u12.col(1).cwiseAbs().maxCoeff() == 0.0);
    const auto t = ht_truncate(f1, 1e-12 * f1.dense().norm());
    CHECK(t.ranks() == std::array<Eigen::Index, 4>{1, 1, 1, 1});
  }
  SUBCASE("random round trip") {
    const Moments2D m{rng.vector(256), rng.vector(256), rng.vector(256), rng.vector(256)};
    const auto f1 = ht_build_f1(m, b);
    CHECK(testing::rel_diff(as_matrix(ht_moments(f1, g, g)), as_matrix(m)) < 1e-12);
  }
}

TEST_CASE("2D complement projection") {
  const auto g = make_velocity_grid(16, 5.0);
  const auto b = make_projection_basis_4d(g, g);
  testing::Rng rng(58);
  const auto f = rng.ht(64, 16, 16, 3, 3, 3, 3);
  const auto c = ht_project_complement(f, b);
  const double scale = f.dense().norm();
  SUBCASE("zero moments") {
    CHECK(as_matrix(ht_moments(c, g, g)).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
  SUBCASE("dense projector") {
    const Matrix d = ht_dense_oracle(f);
    CHECK((c.dense() - (d - dense_projection(d, g))).cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("idempotence") {
    CHECK((ht_project_complement(c, b).dense() - c.dense()).cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("span is annihilated") {
    const auto f1 = ht_build_f1({rng.vector(64), rng.vector(64), rng.vector(64), rng.vector(64)}, b);
    CHECK(ht_project_complement(f1, b).dense().norm() < 1e-11 * f1.dense().norm());
  }
}

TEST_CASE("2D transport terms") {
  testing::Rng rng(59);
  const std::size_t n = 8, nv = 16;
  TransportGrids grids{make_spatial_grid(n, 0.0, 2.0), make_spatial_grid(n, 0.0, 3.0),
                       make_velocity_grid(nv, 5.0), make_velocity_grid(nv, 5.0)};
  const auto f = ht_orthogonalize(rng.ht(64, 16, 16, 2, 2, 2, 2));
  ElectricField field;
  field.dims = 2;
  field.phi = Vector::Zero(64);
  field.e1 = rng.vector(64);
  field.e2 = rng.vector(64);

  SUBCASE("dense operator oracle") {
    using oracle::positive, oracle::negative;
    auto left = [](const Matrix& d, int reps) {
      Matrix out = Matrix::Zero(d.rows() * reps, d.cols() * reps);
      for (int r = 0; r < reps; ++r) out.block(r * d.rows(), r * d.cols(), d.rows(), d.cols()) = d;
      return out;
    };
    auto right = [](const Matrix& d, int reps) {
      Matrix out = Matrix::Zero(d.rows() * reps, d.cols() * reps);
      for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
          out.block(i * reps, j * reps, reps, reps) = d(i, j) * Matrix::Identity(reps, reps);
      return out;
    };
    const double h1 = grids.x1.h, h2 = grids.x2.h, hv = grids.v1.h;
    const Matrix d1p = left(oracle::upwind_matrix(n, h1, true, true), n);
    const Matrix d1m = left(oracle::upwind_matrix(n, h1, false, true), n);
    const Matrix d2p = right(oracle::upwind_matrix(n, h2, true, true), n);
    const Matrix d2m = right(oracle::upwind_matrix(n, h2, false, true), n);
    const Matrix v1p = left(oracle::upwind_matrix(nv, hv, true, false), nv);
    const Matrix v1m = left(oracle::upwind_matrix(nv, hv, false, false), nv);
    const Matrix v2p = right(oracle::upwind_matrix(nv, hv, true, false), nv);
    const Matrix v2m = right(oracle::upwind_matrix(nv, hv, false, false), nv);
    const Vector a = pair_field(grids.v1, [](double x, double) { return x; });
    const Vector bb = pair_field(grids.v1, [](double, double y) { return y; });
    const Matrix d = ht_dense_oracle(f);
    const Matrix rate =
        -(d1p * d * positive(a).asDiagonal() + d1m * d * negative(a).asDiagonal() +
          d2p * d * positive(bb).asDiagonal() + d2m * d * negative(bb).asDiagonal() +
          positive(field.e1).asDiagonal() * d * v1p.transpose() +
          negative(field.e1).asDiagonal() * d * v1m.transpose() +
          positive(field.e2).asDiagonal() * d * v2p.transpose() +
          negative(field.e2).asDiagonal() * d * v2m.transpose());
    CHECK(testing::rel_diff(ht_transport_terms(f, field, grids).dense(), rate) < 1e-12);
    const auto mixed = ht_transport_terms(f, field, grids, 0.3, 0.7);
    CHECK(testing::rel_diff(mixed.dense(), 0.3 * rate + 0.7 * d) < 1e-12);
  }
  SUBCASE("zero input") {
    CHECK(ht_transport_terms(HTTensor::zero(64, 16, 16), field, grids).dense().norm() == 0.0);
  }
  SUBCASE("uniform state without field") {
    ElectricField none = field;
    none.e1.setZero();
    none.e2.setZero();
    const auto u = HTTensor::product(Vector::Ones(64), rng.vector(16), rng.vector(16));
    CHECK(ht_transport_terms(u, none, grids).dense().cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("size mismatch") {
    ElectricField bad = field;
    bad.e2 = Vector::Zero(63);
    CHECK_THROWS_AS(ht_transport_terms(f, bad, grids), DimensionError);
  }
}
