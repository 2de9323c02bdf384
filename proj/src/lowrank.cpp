#include "lomac/lowrank.hpp"

#include "lomac/errors.hpp"
#include "lomac/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace lomac {

namespace detail {

ThinQr thin_qr(const Matrix& a) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<Matrix> qr(a);
  ThinQr out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

Eigen::Index rank_for_tail(const Vector& sigma, double tol) {
  Eigen::Index keep = sigma.size();
  double tail2 = 0.0;
  const double tol2 = tol * tol;
  while (keep > 0) {
    const double next = tail2 + sigma[keep - 1] * sigma[keep - 1];
    if (next > tol2) break;
    tail2 = next;
    --keep;
  }
  return keep;
}

void scale_rows(Matrix& m, const Vector& s) {
  if (m.rows() != s.size()) throw DimensionError("scale_rows: length mismatch");
  const auto& k = kernels::active();
  for (Eigen::Index l = 0; l < m.cols(); ++l)
    k.hadamard(m.col(l).data(), s.data(), m.col(l).data(), static_cast<std::size_t>(m.rows()));
}

}  // namespace detail

namespace {

struct Svd {
  Vector sigma;
  Matrix x;
  Matrix v;
};

Svd factored_svd(const LowRankMatrix& f) {
  const auto qx = detail::thin_qr(f.x);
  const auto qv = detail::thin_qr(f.v);
  const Matrix core = qx.r * f.coef.asDiagonal() * qv.r.transpose();
  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), qx.q * svd.matrixU(), qv.q * svd.matrixV()};
}

LowRankMatrix from_svd(const Svd& s, Eigen::Index keep) {
  LowRankMatrix out;
  out.coef = s.sigma.head(keep);
  out.x = s.x.leftCols(keep);
  out.v = s.v.leftCols(keep);
  out.canonical = true;
  return out;
}

}  // namespace

LowRankMatrix LowRankMatrix::zero(Eigen::Index nx, Eigen::Index nv) {
  LowRankMatrix f;
  f.coef.resize(0);
  f.x.resize(nx, 0);
  f.v.resize(nv, 0);
  f.canonical = true;
  return f;
}

LowRankMatrix LowRankMatrix::outer(const Vector& a, const Vector& b, double c) {
  LowRankMatrix f;
  f.coef = Vector::Constant(1, c);
  f.x = a;
  f.v = b;
  return f;
}

Matrix LowRankMatrix::dense() const { return x * coef.asDiagonal() * v.transpose(); }

LowRankMatrix add(std::span<const LowRankMatrix> terms) {
  if (terms.empty()) throw DimensionError("add: no terms");
  const Eigen::Index nx = terms.front().nx();
  const Eigen::Index nv = terms.front().nv();
  Eigen::Index r = 0;
  for (const auto& t : terms) {
    if (t.nx() != nx || t.nv() != nv) throw DimensionError("add: grid size mismatch");
    r += t.rank();
  }
  if (terms.size() == 1) return terms.front();
  LowRankMatrix out;
  out.coef.resize(r);
  out.x.resize(nx, r);
  out.v.resize(nv, r);
  Eigen::Index at = 0;
  for (const auto& t : terms) {
    const Eigen::Index k = t.rank();
    out.coef.segment(at, k) = t.coef;
    out.x.middleCols(at, k) = t.x;
    out.v.middleCols(at, k) = t.v;
    at += k;
  }
  out.canonical = false;
  return out;
}

LowRankMatrix add(const LowRankMatrix& a, const LowRankMatrix& b) {
  const LowRankMatrix terms[] = {a, b};
  return add(std::span<const LowRankMatrix>(terms));
}

LowRankMatrix scaled(const LowRankMatrix& f, double alpha) {
  LowRankMatrix out = f;
  out.coef *= alpha;
  if (alpha < 0.0) out.canonical = false;
  return out;
}

LowRankMatrix recompress(const LowRankMatrix& f, double drop_tol) {
  if (f.canonical && drop_tol == 0.0) return f;
  if (f.rank() == 0) return LowRankMatrix::zero(f.nx(), f.nv());
  const Svd s = factored_svd(f);
  Eigen::Index keep = 0;
  while (keep < s.sigma.size() && s.sigma[keep] > drop_tol) ++keep;
  return from_svd(s, keep);
}

LowRankMatrix truncate(const LowRankMatrix& f, double eps, TruncationMode mode) {
  if (!(eps >= 0.0)) throw DomainError("truncate: eps must be >= 0");
  if (f.rank() == 0) return LowRankMatrix::zero(f.nx(), f.nv());
  const Svd s = f.canonical ? Svd{f.coef, f.x, f.v} : factored_svd(f);
  double tol = eps;
  if (mode == TruncationMode::relative) tol *= s.sigma.norm();
  Eigen::Index keep = detail::rank_for_tail(s.sigma, tol);
  // Exact zeros never carry information.
  while (keep > 0 && s.sigma[keep - 1] == 0.0) --keep;
  return from_svd(s, keep);
}

LowRankMatrix weighted_truncate(const LowRankMatrix& f, const Vector& w, double eps,
                                TruncationMode mode) {
  if (w.size() != f.nv()) throw DimensionError("weighted_truncate: weight length mismatch");
  if ((w.array() <= 0.0).any()) throw DomainError("weighted_truncate: weights must be positive");
  const Vector sqrt_w = w.cwiseSqrt();
  const Vector inv_sqrt_w = sqrt_w.cwiseInverse();
  LowRankMatrix g = f;
  detail::scale_rows(g.v, inv_sqrt_w);
  g.canonical = false;
  LowRankMatrix t = truncate(g, eps, mode);
  detail::scale_rows(t.v, sqrt_w);
  t.canonical = false;
  return t;
}

}  // namespace lomac
