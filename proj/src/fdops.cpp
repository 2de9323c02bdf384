#include "lomac/fdops.hpp"

#include "lomac/errors.hpp"
#include "lomac/kernels.hpp"

#include <string>
#include <vector>

namespace lomac {

namespace {

constexpr std::size_t kLeftGhosts = 3;
constexpr std::size_t kRightGhosts = 3;

void check_length(std::size_t n, Boundary boundary) {
  const std::size_t min_n = boundary == Boundary::periodic ? kMinGridPoints : 5;
  if (n < min_n)
    throw SizingError("upwind stencil needs at least " + std::to_string(min_n) +
                      " cells, got " + std::to_string(n));
}

// Writes the N+1 interface values of `cells` into `out`, using `pad` as
// scratch for the ghost-extended array.
void reconstruct_into(const double* cells, std::size_t n, Upwind dir, Boundary boundary,
                      std::vector<double>& pad, double* out) {
  pad.assign(n + kLeftGhosts + kRightGhosts, 0.0);
  std::copy(cells, cells + n, pad.begin() + kLeftGhosts);
  if (boundary == Boundary::periodic) {
    for (std::size_t g = 0; g < kLeftGhosts; ++g) pad[g] = cells[n - kLeftGhosts + g];
    for (std::size_t g = 0; g < kRightGhosts; ++g) pad[kLeftGhosts + n + g] = cells[g];
  }
  // Interface k - 1/2 reads cells k-3..k+1 (plus) or k-2..k+2 (minus).
  const std::size_t shift = dir == Upwind::plus ? 0 : 1;
  const double* coeffs = dir == Upwind::plus ? kPlusStencil.data() : kMinusStencil.data();
  kernels::active().stencil5(pad.data() + shift, coeffs, out, n + 1);
}

void difference_into(const double* interfaces, std::size_t n, double h, double* out) {
  const double inv_h = 1.0 / h;
  for (std::size_t k = 0; k < n; ++k) out[k] = (interfaces[k + 1] - interfaces[k]) * inv_h;
}

}  // namespace

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "zero") return Boundary::zero;
  throw ConfigError("unknown boundary policy '" + std::string(name) +
                    "' (expected periodic or zero)");
}

Vector reconstruct_interface(const Vector& cells, Upwind dir, Boundary boundary) {
  const auto n = static_cast<std::size_t>(cells.size());
  check_length(n, boundary);
  Vector out(cells.size() + 1);
  std::vector<double> pad;
  reconstruct_into(cells.data(), n, dir, boundary, pad, out.data());
  return out;
}

Vector flux_difference(const Vector& interfaces, double h) {
  if (interfaces.size() < 2) throw DimensionError("flux_difference: need at least two interfaces");
  const auto n = static_cast<std::size_t>(interfaces.size() - 1);
  Vector out(interfaces.size() - 1);
  difference_into(interfaces.data(), n, h, out.data());
  return out;
}

Vector upwind_derivative(const Vector& u, Upwind dir, double h, Boundary boundary) {
  return flux_difference(reconstruct_interface(u, dir, boundary), h);
}

Matrix upwind_derivative_columns(const Matrix& u, Upwind dir, double h, Boundary boundary) {
  const auto n = static_cast<std::size_t>(u.rows());
  check_length(n, boundary);
  Matrix out(u.rows(), u.cols());
  std::vector<double> pad;
  std::vector<double> faces(n + 1);
  for (Eigen::Index l = 0; l < u.cols(); ++l) {
    reconstruct_into(u.col(l).data(), n, dir, boundary, pad, faces.data());
    difference_into(faces.data(), n, h, out.col(l).data());
  }
  return out;
}

Matrix upwind_derivative_2d(const Matrix& u, std::size_t n1, std::size_t n2, int axis, Upwind dir,
                            double h, Boundary boundary) {
  if (static_cast<std::size_t>(u.rows()) != n1 * n2)
    throw DimensionError("upwind_derivative_2d: field size mismatch");
  const std::size_t len = axis == 0 ? n1 : n2;
  const std::size_t lines = axis == 0 ? n2 : n1;
  check_length(len, boundary);
  Matrix out(u.rows(), u.cols());
  std::vector<double> pad;
  std::vector<double> line(len);
  std::vector<double> faces(len + 1);
  std::vector<double> result(len);
  for (Eigen::Index l = 0; l < u.cols(); ++l) {
    const double* src = u.col(l).data();
    double* dst = out.col(l).data();
    for (std::size_t m = 0; m < lines; ++m) {
      if (axis == 0) {
        reconstruct_into(src + m * n1, len, dir, boundary, pad, faces.data());
        difference_into(faces.data(), len, h, dst + m * n1);
      } else {
        for (std::size_t i = 0; i < len; ++i) line[i] = src[m + n1 * i];
        reconstruct_into(line.data(), len, dir, boundary, pad, faces.data());
        difference_into(faces.data(), len, h, result.data());
        for (std::size_t i = 0; i < len; ++i) dst[m + n1 * i] = result[i];
      }
    }
  }
  return out;
}

}  // namespace lomac
