#include <doctest.h>

#include <cmath>

#include "mfbo/linalg.hpp"
#include "mfbo/rng.hpp"
#include "mfbo/simd/simd.hpp"

using namespace mfbo;

namespace {

Matrix random_spd(Rng& rng, std::size_t n, double diag_boost) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  }
  Matrix spd(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = simd::dot(a.row(i), a.row(j), n);
      spd(i, j) = v;
      spd(j, i) = v;
    }
    spd(i, i) += diag_boost;
  }
  return spd;
}

}  // namespace

TEST_CASE("cholesky reconstructs the input within 1e-8 relative Frobenius error") {
  Rng rng(3);
  for (std::size_t n : {1u, 2u, 5u, 20u, 50u}) {
    const Matrix spd = random_spd(rng, n, 0.5);
    Matrix chol = spd;
    REQUIRE(cholesky_lower_inplace(chol));
    double err = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double rebuilt = simd::dot(chol.row(i), chol.row(j), std::min(i, j) + 1);
        err += (rebuilt - spd(i, j)) * (rebuilt - spd(i, j));
        norm += spd(i, j) * spd(i, j);
      }
    }
    CHECK(std::sqrt(err / norm) < 1e-8);
  }
}

TEST_CASE("cholesky reports indefinite matrices") {
  Matrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 2.0;
  bad(1, 0) = 2.0;
  bad(1, 1) = 1.0;  // eigenvalues 3, -1
  CHECK_FALSE(cholesky_lower_inplace(bad));
}

TEST_CASE("triangular solves invert the factor") {
  Rng rng(5);
  const std::size_t n = 30;
  const Matrix spd = random_spd(rng, n, 1.0);
  Matrix chol = spd;
  REQUIRE(cholesky_lower_inplace(chol));

  std::vector<double> b(n);
  for (auto& v : b) v = rng.uniform(-3.0, 3.0);

  const std::vector<double> x = solve_cholesky(chol, b);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(simd::dot(spd.row(i), x.data(), n) == doctest::Approx(b[i]).epsilon(1e-9));
  }

  std::vector<double> y(n), z(n);
  solve_lower(chol, b, y);
  solve_lower_transpose(chol, y, z);
  for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("identity factor solves are exact") {
  const Matrix eye = Matrix::identity(4);
  Matrix chol = eye;
  REQUIRE(cholesky_lower_inplace(chol));
  std::vector<double> b{1.0, -2.0, 3.0, 0.5};
  std::vector<double> x(4);
  solve_lower(chol, b, x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == b[i]);
}
