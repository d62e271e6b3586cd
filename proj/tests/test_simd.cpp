#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfbo/rng.hpp"
#include "mfbo/simd/simd.hpp"

using namespace mfbo;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::force_isa(saved); }
};

}  // namespace

TEST_CASE("scalar and dispatched kernels agree across sizes and tails") {
  if (!simd::isa_supported(simd::Isa::Avx2)) return;
  IsaGuard guard;
  Rng rng(42);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u,
                        65u, 127u, 250u, 257u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);

    simd::force_isa(simd::Isa::Scalar);
    const double dot_s = simd::dot(a.data(), b.data(), n);
    const double sq_s = simd::squared_distance(a.data(), b.data(), n);
    const double sum_s = simd::sum(a.data(), n);
    std::vector<double> y_s = b;
    simd::axpy(0.37, a.data(), y_s.data(), n);

    simd::force_isa(simd::Isa::Avx2);
    const double dot_v = simd::dot(a.data(), b.data(), n);
    const double sq_v = simd::squared_distance(a.data(), b.data(), n);
    const double sum_v = simd::sum(a.data(), n);
    std::vector<double> y_v = b;
    simd::axpy(0.37, a.data(), y_v.data(), n);

    const double tol = 1e-13 * (1.0 + static_cast<double>(n));
    CHECK(dot_v == doctest::Approx(dot_s).epsilon(tol));
    CHECK(sq_v == doctest::Approx(sq_s).epsilon(tol));
    CHECK(sum_v == doctest::Approx(sum_s).epsilon(tol));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y_v[i] == doctest::Approx(y_s[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernels handle exact zero and identity cases") {
  Rng rng(7);
  const auto a = random_vec(rng, 33);
  CHECK(simd::squared_distance(a.data(), a.data(), a.size()) == 0.0);
  const std::vector<double> zeros(33, 0.0);
  CHECK(simd::dot(a.data(), zeros.data(), a.size()) == 0.0);
  CHECK(simd::sum(zeros.data(), zeros.size()) == 0.0);
}

TEST_CASE("squared_distance equals the algebraic expansion") {
  Rng rng(11);
  const auto a = random_vec(rng, 101);
  const auto b = random_vec(rng, 101);
  const double expanded = simd::dot(a.data(), a.data(), a.size()) -
                          2.0 * simd::dot(a.data(), b.data(), a.size()) +
                          simd::dot(b.data(), b.data(), b.size());
  CHECK(simd::squared_distance(a.data(), b.data(), a.size()) ==
        doctest::Approx(expanded).epsilon(1e-12));
}

TEST_CASE("force_isa rejects unsupported targets gracefully") {
  CHECK(simd::isa_supported(simd::Isa::Scalar));
  IsaGuard guard;
  simd::force_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
}
