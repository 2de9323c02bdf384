#include "lomac/kernels.hpp"

#if defined(LOMAC_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace lomac::kernels::avx2 {

#if defined(LOMAC_HAVE_AVX2)

bool available() { return __builtin_cpu_supports("avx2"); }

void stencil5(const double* in, const double* c, double* out, std::size_t n) {
  const __m256d c0 = _mm256_set1_pd(c[0]);
  const __m256d c1 = _mm256_set1_pd(c[1]);
  const __m256d c2 = _mm256_set1_pd(c[2]);
  const __m256d c3 = _mm256_set1_pd(c[3]);
  const __m256d c4 = _mm256_set1_pd(c[4]);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d acc = _mm256_mul_pd(c0, _mm256_loadu_pd(in + k));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(c1, _mm256_loadu_pd(in + k + 1)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(c2, _mm256_loadu_pd(in + k + 2)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(c3, _mm256_loadu_pd(in + k + 3)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(c4, _mm256_loadu_pd(in + k + 4)));
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < n) scalar::stencil5(in + k, c, out + k, n - k);
}

void contract(const double* a, std::size_t rows, std::size_t cols, const double* p, double* out) {
  for (std::size_t l = 0; l < cols; ++l) {
    const double* col = a + rows * l;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= rows; j += 8) {
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(col + j), _mm256_loadu_pd(p + j)));
      acc1 = _mm256_add_pd(acc1,
                           _mm256_mul_pd(_mm256_loadu_pd(col + j + 4), _mm256_loadu_pd(p + j + 4)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; j < rows; ++j) acc += col[j] * p[j];
    out[l] = acc;
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
  for (; j < n; ++j) out[j] = a[j] * b[j];
}

#else

bool available() { return false; }
void stencil5(const double* in, const double* c, double* out, std::size_t n) {
  scalar::stencil5(in, c, out, n);
}
void contract(const double* a, std::size_t rows, std::size_t cols, const double* p, double* out) {
  scalar::contract(a, rows, cols, p, out);
}
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  scalar::hadamard(a, b, out, n);
}

#endif

}  // namespace lomac::kernels::avx2
