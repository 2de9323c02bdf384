#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop kernels shared by the stencil operators and the velocity
// quadratures. Every kernel has a scalar reference implementation and, where
// the host supports it, a SIMD variant chosen once at startup.
namespace lomac::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// out[k] = c[0]*in[k] + c[1]*in[k+1] + ... + c[4]*in[k+4], k < n.
// Summation order is left to right in every variant, so results are
// bit-identical across ISAs.
using Stencil5Fn = void (*)(const double* in, const double* c, double* out, std::size_t n);

// out[l] = sum_j a[j + rows*l] * p[j] for a column-major rows x cols block.
using ContractFn = void (*)(const double* a, std::size_t rows, std::size_t cols,
                            const double* p, double* out);

// out[j] = a[j] * b[j]. out may alias a or b.
using HadamardFn = void (*)(const double* a, const double* b, double* out, std::size_t n);

struct KernelTable {
  Isa isa;
  Stencil5Fn stencil5;
  ContractFn contract;
  HadamardFn hadamard;
};

// Best ISA supported by the running CPU.
Isa detect_isa();

// Table for a specific ISA. Requesting an ISA the CPU or build lacks falls
// back to scalar.
const KernelTable& table(Isa isa);

// Currently selected table (initialized to detect_isa()).
const KernelTable& active();

// Pin the dispatch, e.g. to compare variants in tests.
void select(Isa isa);

namespace scalar {
void stencil5(const double* in, const double* c, double* out, std::size_t n);
void contract(const double* a, std::size_t rows, std::size_t cols, const double* p, double* out);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool available();
void stencil5(const double* in, const double* c, double* out, std::size_t n);
void contract(const double* a, std::size_t rows, std::size_t cols, const double* p, double* out);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2

}  // namespace lomac::kernels
