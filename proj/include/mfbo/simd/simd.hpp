#pragma once

#include <cstddef>

namespace mfbo::simd {

enum class Isa { Scalar, Avx2 };

// The instruction set the kernels below are currently routed to. Resolved
// once on first use from CPU features and the MFBO_SIMD environment variable
// ("scalar", "avx2" or "auto").
Isa active_isa();

const char* isa_name(Isa isa);

bool isa_supported(Isa isa);

// Reroutes the kernels (tests exercise both paths on one machine). Throws
// std::invalid_argument when the requested ISA is unavailable. Not safe to
// call while kernels run on other threads.
void force_isa(Isa isa);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i (a[i] - b[i])^2
double squared_distance(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum_i x[i]
double sum(const double* x, std::size_t n);

}  // namespace mfbo::simd
