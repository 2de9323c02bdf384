#include "lomac/ht.hpp"

#include "lomac/errors.hpp"
#include "lomac/fdops.hpp"
#include "lomac/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <optional>

namespace lomac {

namespace {

Vector contract(const Matrix& factors, const Vector& p) {
  if (factors.rows() != p.size()) throw DimensionError("contract: length mismatch");
  Vector out(factors.cols());
  kernels::active().contract(factors.data(), static_cast<std::size_t>(factors.rows()),
                             static_cast<std::size_t>(factors.cols()), p.data(), out.data());
  return out;
}

Eigen::Map<const Matrix> slice_of(const Matrix& b34, Eigen::Index r3, Eigen::Index r4,
                                  Eigen::Index b) {
  return Eigen::Map<const Matrix>(b34.col(b).data(), r3, r4);
}

Eigen::Map<Matrix> slice_of(Matrix& b34, Eigen::Index r3, Eigen::Index r4, Eigen::Index b) {
  return Eigen::Map<Matrix>(b34.col(b).data(), r3, r4);
}

void require_same_grids(const HTTensor& a, const HTTensor& b) {
  if (a.n12() != b.n12() || a.nv1() != b.nv1() || a.nv2() != b.nv2())
    throw DimensionError("HT tensors live on different grids");
}

// Left singular vectors and singular values of a wide matrix, via QR of its
// transpose so that small singular values keep full relative accuracy.
struct LeftSvd {
  Vector sigma;
  Matrix u;
};

LeftSvd left_svd(const Matrix& a) {
  if (a.cols() <= a.rows()) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
    return {svd.singularValues(), svd.matrixU()};
  }
  const auto qr = detail::thin_qr(a.transpose());
  Eigen::BDCSVD<Matrix> svd(qr.r.transpose(), Eigen::ComputeThinU);
  return {svd.singularValues(), svd.matrixU()};
}

Eigen::Index keep_for(const Vector& sigma, double tol) {
  Eigen::Index keep = detail::rank_for_tail(sigma, tol);
  while (keep > 0 && sigma[keep - 1] == 0.0) --keep;
  return keep;
}

}  // namespace

std::array<Eigen::Index, 4> HTTensor::ranks() const { return {r12(), r34(), r3(), r4()}; }

Eigen::Index HTTensor::element_count() const {
  return u12.size() + root.size() + b34.size() + u3.size() + u4.size();
}

Eigen::Map<const Matrix> HTTensor::slice(Eigen::Index b) const {
  return slice_of(b34, r3(), r4(), b);
}

Matrix HTTensor::dense() const {
  const Eigen::Index nv = nv1() * nv2();
  Matrix u34(nv, r34());
  for (Eigen::Index b = 0; b < r34(); ++b) {
    const Matrix block = u3 * slice(b) * u4.transpose();
    u34.col(b) = Eigen::Map<const Vector>(block.data(), nv);
  }
  return u12 * root * u34.transpose();
}

HTTensor HTTensor::zero(Eigen::Index n12, Eigen::Index nv1, Eigen::Index nv2) {
  HTTensor f;
  f.u12.resize(n12, 0);
  f.root.resize(0, 0);
  f.b34.resize(0, 0);
  f.u3.resize(nv1, 0);
  f.u4.resize(nv2, 0);
  f.canonical = true;
  return f;
}

HTTensor HTTensor::product(const Vector& a12, const Vector& a3, const Vector& a4, double c) {
  HTTensor f;
  f.u12 = a12;
  f.u3 = a3;
  f.u4 = a4;
  f.root = Matrix::Constant(1, 1, c);
  f.b34 = Matrix::Ones(1, 1);
  return f;
}

HTTensor ht_add(std::span<const HTTensor> terms) {
  if (terms.empty()) throw DimensionError("ht_add: no terms");
  if (terms.size() == 1) return terms.front();
  Eigen::Index r12 = 0, r34 = 0, r3 = 0, r4 = 0;
  for (const auto& t : terms) {
    require_same_grids(terms.front(), t);
    r12 += t.r12();
    r34 += t.r34();
    r3 += t.r3();
    r4 += t.r4();
  }
  const auto& first = terms.front();
  HTTensor out;
  out.u12 = Matrix::Zero(first.n12(), r12);
  out.u3 = Matrix::Zero(first.nv1(), r3);
  out.u4 = Matrix::Zero(first.nv2(), r4);
  out.root = Matrix::Zero(r12, r34);
  out.b34 = Matrix::Zero(r3 * r4, r34);
  Eigen::Index o12 = 0, o34 = 0, o3 = 0, o4 = 0;
  for (const auto& t : terms) {
    out.u12.middleCols(o12, t.r12()) = t.u12;
    out.u3.middleCols(o3, t.r3()) = t.u3;
    out.u4.middleCols(o4, t.r4()) = t.u4;
    out.root.block(o12, o34, t.r12(), t.r34()) = t.root;
    for (Eigen::Index b = 0; b < t.r34(); ++b)
      slice_of(out.b34, r3, r4, o34 + b).block(o3, o4, t.r3(), t.r4()) = t.slice(b);
    o12 += t.r12();
    o34 += t.r34();
    o3 += t.r3();
    o4 += t.r4();
  }
  out.canonical = false;
  return out;
}

HTTensor ht_add(const HTTensor& a, const HTTensor& b) {
  const HTTensor terms[] = {a, b};
  return ht_add(std::span<const HTTensor>(terms));
}

HTTensor ht_scaled(const HTTensor& f, double alpha) {
  HTTensor out = f;
  out.root *= alpha;
  return out;
}

HTTensor ht_orthogonalize(const HTTensor& f) {
  if (f.r12() == 0 || f.r34() == 0 || f.r3() == 0 || f.r4() == 0)
    return HTTensor::zero(f.n12(), f.nv1(), f.nv2());
  const auto q3 = detail::thin_qr(f.u3);
  const auto q4 = detail::thin_qr(f.u4);
  const auto q12 = detail::thin_qr(f.u12);
  const Eigen::Index k3 = q3.q.cols();
  const Eigen::Index k4 = q4.q.cols();
  // R3 applied to all slices in one product, then R4 slice by slice.
  const Eigen::Map<const Matrix> wide(f.b34.data(), f.r3(), f.r4() * f.r34());
  const Matrix left = q3.r * wide;
  const Matrix r4t = q4.r.transpose();
  Matrix pushed(k3 * k4, f.r34());
  for (Eigen::Index b = 0; b < f.r34(); ++b)
    slice_of(pushed, k3, k4, b).noalias() = left.middleCols(b * f.r4(), f.r4()) * r4t;
  const auto q34 = detail::thin_qr(pushed);
  HTTensor out;
  out.u12 = q12.q;
  out.u3 = q3.q;
  out.u4 = q4.q;
  out.b34 = q34.q;
  out.root = q12.r * f.root * q34.r.transpose();
  out.canonical = true;
  return out;
}

namespace {

struct Box {
  Eigen::Index row = 0, col = 0, rows = 0, cols = 0;
};

Box nonzero_box(const Eigen::Map<const Matrix>& s) {
  Eigen::Index r0 = s.rows(), r1 = 0, c0 = s.cols(), c1 = 0;
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      if (s(i, j) != 0.0) {
        r0 = std::min(r0, i);
        r1 = std::max(r1, i + 1);
        c0 = std::min(c0, j);
        c1 = std::max(c1, j + 1);
      }
  if (r1 == 0) return {};
  return {r0, c0, r1 - r0, c1 - c0};
}

// Orthonormal frame of a tall factor, kept in Householder form so that only
// the few retained directions are ever materialized.
class Frame {
 public:
  explicit Frame(const Matrix& a) : qr_(a), rows_(a.rows()), k_(std::min(a.rows(), a.cols())) {}

  Matrix r() const {
    return qr_.matrixQR().topRows(k_).triangularView<Eigen::Upper>();
  }
  Eigen::Index cols() const { return k_; }

  // Q * c for a k x m coefficient block c.
  Matrix apply(const Matrix& c) const {
    Matrix out = Matrix::Zero(rows_, c.cols());
    out.topRows(k_) = c;
    out.applyOnTheLeft(qr_.householderQ());
    return out;
  }

 private:
  Eigen::HouseholderQR<Matrix> qr_;
  Eigen::Index rows_;
  Eigen::Index k_;
};

}  // namespace

HTTensor ht_truncate(const HTTensor& f, double eps, TruncationMode mode) {
  if (!(eps >= 0.0)) throw DomainError("ht_truncate: eps must be >= 0");
  if (f.r12() == 0 || f.r34() == 0 || f.r3() == 0 || f.r4() == 0)
    return HTTensor::zero(f.n12(), f.nv1(), f.nv2());

  // Orthogonalize leaves to root. The (1,2) frame and the (3,4) transfer
  // unfolding are the large factors; they stay implicit.
  Matrix u3 = f.u3, u4 = f.u4, b34 = f.b34, root = f.root;
  std::optional<Frame> q12, q34;
  if (!f.canonical) {
    const auto t3 = detail::thin_qr(f.u3);
    const auto t4 = detail::thin_qr(f.u4);
    const Eigen::Index k3 = t3.q.cols(), k4 = t4.q.cols();
    // Sums leave the transfer slices block sparse; only the nonzero box of
    // each slice is pushed through R3 and R4.
    Matrix pushed = Matrix::Zero(k3 * k4, f.r34());
    for (Eigen::Index b = 0; b < f.r34(); ++b) {
      const auto s = f.slice(b);
      const Box box = nonzero_box(s);
      if (box.rows == 0) continue;
      slice_of(pushed, k3, k4, b).noalias() =
          t3.r.middleCols(box.row, box.rows) * s.block(box.row, box.col, box.rows, box.cols) *
          t4.r.middleCols(box.col, box.cols).transpose();
    }
    u3 = t3.q;
    u4 = t4.q;
    q12.emplace(f.u12);
    q34.emplace(pushed);
    root = q12->r() * f.root * q34->r().transpose();
  }

  Eigen::BDCSVD<Matrix> root_svd(root, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = root_svd.singularValues();
  double tol = eps / std::numbers::sqrt3;
  if (mode == TruncationMode::relative) tol *= sigma.norm();
  const Eigen::Index kr = keep_for(sigma, tol);
  if (kr == 0) return HTTensor::zero(f.n12(), f.nv1(), f.nv2());

  // Root first; the leaves are then truncated against the truncated core,
  // which keeps the same per-edge error bound.
  const Matrix vr = root_svd.matrixV().leftCols(kr);
  const Matrix rotated = q34 ? q34->apply(vr) : Matrix(b34 * vr);
  const Eigen::Index k3 = u3.cols();
  const Eigen::Index k4 = u4.cols();
  Matrix unfold3(k3, k4 * kr);
  Matrix unfold4(k4, k3 * kr);
  for (Eigen::Index b = 0; b < kr; ++b) {
    const auto s = slice_of(rotated, k3, k4, b);
    unfold3.middleCols(b * k4, k4) = sigma[b] * s;
    unfold4.middleCols(b * k3, k3) = sigma[b] * s.transpose();
  }
  const LeftSvd node3 = left_svd(unfold3);
  const LeftSvd node4 = left_svd(unfold4);
  const Eigen::Index t3 = keep_for(node3.sigma, tol);
  const Eigen::Index t4 = keep_for(node4.sigma, tol);
  if (t3 == 0 || t4 == 0) return HTTensor::zero(f.n12(), f.nv1(), f.nv2());

  const Matrix v3 = node3.u.leftCols(t3);
  const Matrix v4 = node4.u.leftCols(t4);
  const Matrix ur = root_svd.matrixU().leftCols(kr);
  HTTensor out;
  out.u12 = q12 ? q12->apply(ur) : Matrix(f.u12 * ur);
  out.root = sigma.head(kr).asDiagonal();
  out.u3 = u3 * v3;
  out.u4 = u4 * v4;
  out.b34.resize(t3 * t4, kr);
  for (Eigen::Index b = 0; b < kr; ++b)
    slice_of(out.b34, t3, t4, b) = v3.transpose() * slice_of(rotated, k3, k4, b) * v4;
  out.canonical = false;
  return out;
}

HTTensor ht_weighted_truncate(const HTTensor& f, const Vector& w1, const Vector& w2, double eps,
                              TruncationMode mode) {
  if (w1.size() != f.nv1() || w2.size() != f.nv2())
    throw DimensionError("ht_weighted_truncate: weight length mismatch");
  if ((w1.array() <= 0.0).any() || (w2.array() <= 0.0).any())
    throw DomainError("ht_weighted_truncate: weights must be positive");
  HTTensor g = f;
  detail::scale_rows(g.u3, w1.cwiseSqrt().cwiseInverse());
  detail::scale_rows(g.u4, w2.cwiseSqrt().cwiseInverse());
  g.canonical = false;
  HTTensor t = ht_truncate(g, eps, mode);
  detail::scale_rows(t.u3, w1.cwiseSqrt());
  detail::scale_rows(t.u4, w2.cwiseSqrt());
  t.canonical = false;
  return t;
}

Vector ht_contract(const HTTensor& f, const Vector& p3, const Vector& p4) {
  if (f.r34() == 0 || f.r12() == 0) return Vector::Zero(f.n12());
  const Vector m3 = contract(f.u3, p3);
  const Vector m4 = contract(f.u4, p4);
  Vector s(f.r34());
  for (Eigen::Index b = 0; b < f.r34(); ++b) s[b] = m3.dot(f.slice(b) * m4);
  return f.u12 * (f.root * s);
}

Moments2D ht_moments(const HTTensor& f, const VelocityGrid& g1, const VelocityGrid& g2) {
  if (f.nv1() != static_cast<Eigen::Index>(g1.n) || f.nv2() != static_cast<Eigen::Index>(g2.n))
    throw DimensionError("ht_moments: velocity frame does not match grid");
  const Vector one1 = Vector::Constant(g1.nodes.size(), g1.h);
  const Vector one2 = Vector::Constant(g2.nodes.size(), g2.h);
  const Vector v1 = g1.h * g1.nodes;
  const Vector v2 = g2.h * g2.nodes;
  const Vector sq1 = 0.5 * g1.h * g1.nodes.cwiseProduct(g1.nodes);
  const Vector sq2 = 0.5 * g2.h * g2.nodes.cwiseProduct(g2.nodes);
  Moments2D m;
  m.rho = ht_contract(f, one1, one2);
  m.j1 = ht_contract(f, v1, one2);
  m.j2 = ht_contract(f, one1, v2);
  m.kappa = ht_contract(f, sq1, one2) + ht_contract(f, one1, sq2);
  return m;
}

ProjectionBasis4D make_projection_basis_4d(const VelocityGrid& g1, const VelocityGrid& g2) {
  if (g1.n != g2.n || g1.v_max != g2.v_max || g1.weight.beta != g2.weight.beta)
    throw DimensionError("2D projection basis requires identical v1 and v2 grids");
  ProjectionBasis4D b;
  b.grid = g1;
  const Vector& v = g1.nodes;
  const Vector ones = Vector::Ones(v.size());
  const Vector v2 = v.cwiseProduct(v);
  const double n1 = weighted_inner(ones, ones, g1);
  b.c = weighted_inner(ones, v2, g1) / n1;
  const Vector q = v2 - b.c * ones;
  b.c1 = std::sqrt(n1);
  b.c2 = std::sqrt(weighted_inner(v, v, g1));
  b.c3 = std::sqrt(weighted_inner(q, q, g1));
  b.leaf.resize(v.size(), 3);
  b.leaf.col(0) = g1.w_point / b.c1;
  b.leaf.col(1) = g1.w_point.cwiseProduct(v) / b.c2;
  b.leaf.col(2) = g1.w_point.cwiseProduct(q) / b.c3;
  b.b34 = Matrix::Zero(9, 4);
  const auto at = [](int l3, int l4) { return l3 + 3 * l4; };
  b.b34(at(0, 0), 0) = 1.0;
  b.b34(at(1, 0), 1) = 1.0;
  b.b34(at(0, 1), 2) = 1.0;
  b.b34(at(2, 0), 3) = 1.0 / std::numbers::sqrt2;
  b.b34(at(0, 2), 3) = 1.0 / std::numbers::sqrt2;
  return b;
}

HTTensor ht_build_f1(const Moments2D& m, const ProjectionBasis4D& basis) {
  const Eigen::Index n = m.rho.size();
  if (m.j1.size() != n || m.j2.size() != n || m.kappa.size() != n)
    throw DimensionError("ht_build_f1: moment fields differ in size");
  HTTensor f;
  f.u12.resize(n, 4);
  f.u12.col(0) = m.rho / (basis.c1 * basis.c1);
  f.u12.col(1) = m.j1 / (basis.c1 * basis.c2);
  f.u12.col(2) = m.j2 / (basis.c1 * basis.c2);
  f.u12.col(3) = std::numbers::sqrt2 * (m.kappa - basis.c * m.rho) / (basis.c1 * basis.c3);
  f.root = Matrix::Identity(4, 4);
  f.b34 = basis.b34;
  f.u3 = basis.leaf;
  f.u4 = basis.leaf;
  f.canonical = false;
  return f;
}

HTTensor ht_project_complement(const HTTensor& f, const ProjectionBasis4D& basis) {
  const Moments2D m = ht_moments(f, basis.grid, basis.grid);
  return ht_add(f, ht_scaled(ht_build_f1(m, basis), -1.0));
}

HTTensor ht_transport_terms(const HTTensor& f, const ElectricField& field,
                            const TransportGrids& grids, double transport_coeff,
                            double self_coeff) {
  const std::size_t n1 = grids.x1.n;
  const std::size_t n2 = grids.x2.n;
  if (f.n12() != static_cast<Eigen::Index>(n1 * n2) ||
      f.nv1() != static_cast<Eigen::Index>(grids.v1.n) ||
      f.nv2() != static_cast<Eigen::Index>(grids.v2.n))
    throw DimensionError("ht_transport_terms: tensor does not match grids");
  if (field.e1.size() != f.n12() || field.e2.size() != f.n12())
    throw DimensionError("ht_transport_terms: field does not match spatial grid");
  if (f.r12() == 0 || f.r34() == 0) return HTTensor::zero(f.n12(), f.nv1(), f.nv2());

  const auto leaf_blocks = [](const Matrix& u, const VelocityGrid& g) {
    const Vector vp = g.nodes.cwiseMax(0.0);
    const Vector vm = g.nodes.cwiseMin(0.0);
    const Eigen::Index r = u.cols();
    Matrix out(u.rows(), 5 * r);
    out.middleCols(0, r) = u;
    out.middleCols(r, r) = vp.asDiagonal() * u;
    out.middleCols(2 * r, r) = vm.asDiagonal() * u;
    out.middleCols(3 * r, r) = upwind_derivative_columns(u, Upwind::plus, g.h, Boundary::zero);
    out.middleCols(4 * r, r) = upwind_derivative_columns(u, Upwind::minus, g.h, Boundary::zero);
    return out;
  };

  // Frame blocks for each term: (x-frame operator, node-3 block, node-4 block).
  // Node blocks: 0 identity, 1 v+, 2 v-, 3 D+_v, 4 D-_v.
  struct Term {
    int n3;
    int n4;
  };
  const Term layout[9] = {{1, 0}, {2, 0}, {0, 1}, {0, 2}, {3, 0},
                          {4, 0}, {0, 3}, {0, 4}, {0, 0}};
  const int n_terms = self_coeff != 0.0 ? 9 : 8;

  const Eigen::Index r12 = f.r12();
  const Eigen::Index r34 = f.r34();
  const Eigen::Index r3 = f.r3();
  const Eigen::Index r4 = f.r4();

  const Vector e1p = field.e1.cwiseMax(0.0);
  const Vector e1m = field.e1.cwiseMin(0.0);
  const Vector e2p = field.e2.cwiseMax(0.0);
  const Vector e2m = field.e2.cwiseMin(0.0);

  HTTensor out;
  out.u3 = leaf_blocks(f.u3, grids.v1);
  out.u4 = leaf_blocks(f.u4, grids.v2);
  out.u12.resize(f.n12(), n_terms * r12);
  out.u12.middleCols(0 * r12, r12) =
      upwind_derivative_2d(f.u12, n1, n2, 0, Upwind::plus, grids.x1.h, Boundary::periodic);
  out.u12.middleCols(1 * r12, r12) =
      upwind_derivative_2d(f.u12, n1, n2, 0, Upwind::minus, grids.x1.h, Boundary::periodic);
  out.u12.middleCols(2 * r12, r12) =
      upwind_derivative_2d(f.u12, n1, n2, 1, Upwind::plus, grids.x2.h, Boundary::periodic);
  out.u12.middleCols(3 * r12, r12) =
      upwind_derivative_2d(f.u12, n1, n2, 1, Upwind::minus, grids.x2.h, Boundary::periodic);
  out.u12.middleCols(4 * r12, r12) = e1p.asDiagonal() * f.u12;
  out.u12.middleCols(5 * r12, r12) = e1m.asDiagonal() * f.u12;
  out.u12.middleCols(6 * r12, r12) = e2p.asDiagonal() * f.u12;
  out.u12.middleCols(7 * r12, r12) = e2m.asDiagonal() * f.u12;
  if (n_terms == 9) out.u12.middleCols(8 * r12, r12) = f.u12;

  const Eigen::Index big3 = 5 * r3;
  const Eigen::Index big4 = 5 * r4;
  out.root = Matrix::Zero(n_terms * r12, n_terms * r34);
  out.b34 = Matrix::Zero(big3 * big4, n_terms * r34);
  for (int t = 0; t < n_terms; ++t) {
    const double coeff = t < 8 ? -transport_coeff : self_coeff;
    out.root.block(t * r12, t * r34, r12, r34) = coeff * f.root;
    for (Eigen::Index b = 0; b < r34; ++b)
      slice_of(out.b34, big3, big4, t * r34 + b)
          .block(layout[t].n3 * r3, layout[t].n4 * r4, r3, r4) = f.slice(b);
  }
  out.canonical = false;
  return out;
}

}  // namespace lomac
