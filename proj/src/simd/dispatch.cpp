#include "mfbo/simd/simd.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace mfbo::simd {

namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
};

constexpr KernelTable kScalarTable{
    Isa::Scalar,
    detail::dot_scalar,
    detail::squared_distance_scalar,
    detail::axpy_scalar,
    detail::sum_scalar,
};

#if MFBO_SIMD_HAVE_AVX2
constexpr KernelTable kAvx2Table{
    Isa::Avx2,
    detail::dot_avx2,
    detail::squared_distance_avx2,
    detail::axpy_avx2,
    detail::sum_avx2,
};
#endif

KernelTable resolve() {
  const char* requested = std::getenv("MFBO_SIMD");
  if (requested != nullptr && std::strcmp(requested, "scalar") == 0) {
    return kScalarTable;
  }
#if MFBO_SIMD_HAVE_AVX2
  if (requested != nullptr && std::strcmp(requested, "avx2") == 0) {
    if (!detail::avx2_usable()) {
      throw std::runtime_error("MFBO_SIMD=avx2 but CPU lacks avx2/fma");
    }
    return kAvx2Table;
  }
  if (detail::avx2_usable()) return kAvx2Table;
#endif
  return kScalarTable;
}

KernelTable& table() {
  static KernelTable t = resolve();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if MFBO_SIMD_HAVE_AVX2
  if (isa == Isa::Avx2) return detail::avx2_usable();
#endif
  return false;
}

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string("unsupported ISA: ") + isa_name(isa));
  }
  if (isa == Isa::Scalar) {
    table() = kScalarTable;
    return;
  }
#if MFBO_SIMD_HAVE_AVX2
  table() = kAvx2Table;
#endif
}

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  return table().squared_distance(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}

double sum(const double* x, std::size_t n) {
  return table().sum(x, n);
}

}  // namespace mfbo::simd
