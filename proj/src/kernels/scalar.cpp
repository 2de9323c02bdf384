#include "lomac/kernels.hpp"

namespace lomac::kernels::scalar {

void stencil5(const double* in, const double* c, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    double acc = c[0] * in[k];
    acc = acc + c[1] * in[k + 1];
    acc = acc + c[2] * in[k + 2];
    acc = acc + c[3] * in[k + 3];
    acc = acc + c[4] * in[k + 4];
    out[k] = acc;
  }
}

void contract(const double* a, std::size_t rows, std::size_t cols, const double* p, double* out) {
  for (std::size_t l = 0; l < cols; ++l) {
    const double* col = a + rows * l;
    double acc = 0.0;
    for (std::size_t j = 0; j < rows; ++j) acc += col[j] * p[j];
    out[l] = acc;
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = a[j] * b[j];
}

}  // namespace lomac::kernels::scalar
