#pragma once

#include <cstddef>

// Per-ISA kernel variants. Only dispatch.cpp should include this.
namespace mfbo::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_scalar(const double* x, std::size_t n);

#if defined(__x86_64__) || defined(__i386__)
#define MFBO_SIMD_HAVE_AVX2 1
bool avx2_usable();
double dot_avx2(const double* a, const double* b, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
#else
#define MFBO_SIMD_HAVE_AVX2 0
#endif

}  // namespace mfbo::simd::detail
