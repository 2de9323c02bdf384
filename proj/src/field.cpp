#include "lomac/field.hpp"

#include "lomac/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace lomac {

namespace {

using Complex = std::complex<double>;

void require_periodic(const SpatialGrid& g) {
  if (!g.periodic) throw DomainError("spectral Poisson solve requires a periodic grid");
}

// Angular wavenumber of mode m on a periodic grid of n points; 0 for Nyquist.
double wavenumber(std::size_t m, std::size_t n, double length) {
  const auto signed_m = static_cast<long long>(m);
  const auto half = static_cast<long long>(n / 2);
  if (n % 2 == 0 && signed_m == half) return 0.0;
  const long long idx = signed_m <= half ? signed_m : signed_m - static_cast<long long>(n);
  return 2.0 * std::numbers::pi * static_cast<double>(idx) / length;
}

bool is_nyquist(std::size_t m, std::size_t n) { return n % 2 == 0 && m == n / 2; }

void transform_lines(std::vector<Complex>& data, std::size_t n1, std::size_t n2, int axis,
                     bool inverse) {
  Eigen::FFT<double> fft;
  const std::size_t len = axis == 0 ? n1 : n2;
  const std::size_t lines = axis == 0 ? n2 : n1;
  std::vector<Complex> in(len);
  std::vector<Complex> out(len);
  for (std::size_t m = 0; m < lines; ++m) {
    for (std::size_t i = 0; i < len; ++i)
      in[i] = axis == 0 ? data[i + n1 * m] : data[m + n1 * i];
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (std::size_t i = 0; i < len; ++i) {
      if (axis == 0)
        data[i + n1 * m] = out[i];
      else
        data[m + n1 * i] = out[i];
    }
  }
}

std::vector<Complex> to_complex(const Vector& u) {
  std::vector<Complex> c(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) c[static_cast<std::size_t>(i)] = u[i];
  return c;
}

Vector real_part(const std::vector<Complex>& c) {
  Vector u(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) u[static_cast<Eigen::Index>(i)] = c[i].real();
  return u;
}

}  // namespace

double ElectricField::max_abs(int component) const {
  if (component != 1 && component != 2) throw DomainError("max_abs: component must be 1 or 2");
  const Vector& e = component == 1 ? e1 : e2;
  return e.size() == 0 ? 0.0 : e.cwiseAbs().maxCoeff();
}

ElectricField solve_poisson(const Vector& rho, const SpatialGrid& grid, int sign) {
  require_periodic(grid);
  if (rho.size() != static_cast<Eigen::Index>(grid.n))
    throw DimensionError("solve_poisson: density length mismatch");
  const std::size_t n = grid.n;
  std::vector<Complex> hat = to_complex(rho);
  transform_lines(hat, n, 1, 0, false);
  std::vector<Complex> phi_hat(n), e_hat(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = wavenumber(m, n, grid.length());
    if (m == 0) continue;
    if (is_nyquist(m, n)) {
      // phi keeps the Nyquist mode; its derivative is not representable.
      const double kn = std::numbers::pi * static_cast<double>(n) / grid.length();
      phi_hat[m] = hat[m] / (kn * kn);
      continue;
    }
    phi_hat[m] = hat[m] / (k * k);
    e_hat[m] = -static_cast<double>(sign) * Complex(0.0, k) * phi_hat[m];
  }
  transform_lines(phi_hat, n, 1, 0, true);
  transform_lines(e_hat, n, 1, 0, true);
  ElectricField f;
  f.dims = 1;
  f.phi = real_part(phi_hat);
  f.e1 = real_part(e_hat);
  return f;
}

ElectricField solve_poisson(const Vector& rho, const SpatialGrid& g1, const SpatialGrid& g2,
                            int sign) {
  require_periodic(g1);
  require_periodic(g2);
  const std::size_t n1 = g1.n;
  const std::size_t n2 = g2.n;
  if (rho.size() != static_cast<Eigen::Index>(n1 * n2))
    throw DimensionError("solve_poisson: density size mismatch");
  std::vector<Complex> hat = to_complex(rho);
  transform_lines(hat, n1, n2, 0, false);
  transform_lines(hat, n1, n2, 1, false);
  std::vector<Complex> phi_hat(n1 * n2), e1_hat(n1 * n2), e2_hat(n1 * n2);
  const double kn1 = std::numbers::pi * static_cast<double>(n1) / g1.length();
  const double kn2 = std::numbers::pi * static_cast<double>(n2) / g2.length();
  for (std::size_t m2 = 0; m2 < n2; ++m2) {
    for (std::size_t m1 = 0; m1 < n1; ++m1) {
      if (m1 == 0 && m2 == 0) continue;
      const std::size_t idx = m1 + n1 * m2;
      const double k1 = wavenumber(m1, n1, g1.length());
      const double k2 = wavenumber(m2, n2, g2.length());
      const double k1_full = is_nyquist(m1, n1) ? kn1 : k1;
      const double k2_full = is_nyquist(m2, n2) ? kn2 : k2;
      phi_hat[idx] = hat[idx] / (k1_full * k1_full + k2_full * k2_full);
      e1_hat[idx] = -static_cast<double>(sign) * Complex(0.0, k1) * phi_hat[idx];
      e2_hat[idx] = -static_cast<double>(sign) * Complex(0.0, k2) * phi_hat[idx];
    }
  }
  for (auto* spectrum : {&phi_hat, &e1_hat, &e2_hat}) {
    transform_lines(*spectrum, n1, n2, 0, true);
    transform_lines(*spectrum, n1, n2, 1, true);
  }
  ElectricField f;
  f.dims = 2;
  f.phi = real_part(phi_hat);
  f.e1 = real_part(e1_hat);
  f.e2 = real_part(e2_hat);
  return f;
}

double field_energy(const ElectricField& field, const SpatialGrid& grid) {
  return 0.5 * field.e1.squaredNorm() * grid.h;
}

double field_energy(const ElectricField& field, const SpatialGrid& g1, const SpatialGrid& g2) {
  return 0.5 * (field.e1.squaredNorm() + field.e2.squaredNorm()) * g1.h * g2.h;
}

Vector spectral_derivative(const Vector& u, const SpatialGrid& grid) {
  require_periodic(grid);
  const std::size_t n = grid.n;
  std::vector<Complex> hat = to_complex(u);
  transform_lines(hat, n, 1, 0, false);
  for (std::size_t m = 0; m < n; ++m) hat[m] *= Complex(0.0, wavenumber(m, n, grid.length()));
  transform_lines(hat, n, 1, 0, true);
  return real_part(hat);
}

}  // namespace lomac
