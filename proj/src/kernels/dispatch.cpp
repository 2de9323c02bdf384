#include "lomac/kernels.hpp"

#include <atomic>

namespace lomac::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::stencil5, &scalar::contract, &scalar::hadamard};
constexpr KernelTable kAvx2{Isa::avx2, &avx2::stencil5, &avx2::contract, &avx2::hadamard};

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{&table(detect_isa())};
  return ptr;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::scalar: break;
  }
  return "scalar";
}

Isa detect_isa() { return avx2::available() ? Isa::avx2 : Isa::scalar; }

const KernelTable& table(Isa isa) {
  if (isa == Isa::avx2 && avx2::available()) return kAvx2;
  return kScalar;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

}  // namespace lomac::kernels
