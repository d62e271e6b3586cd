#include "mfbo/linalg.hpp"

#include <cassert>
#include <cmath>

#include "mfbo/simd/simd.hpp"

namespace mfbo {

bool cholesky_lower_inplace(Matrix& a) {
  assert(a.rows() == a.cols());
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = a(j, j) - simd::dot(a.row(j), a.row(j), j);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - simd::dot(a.row(i), a.row(j), j)) / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
  }
  return true;
}

void solve_lower(const Matrix& chol, std::span<const double> b, std::span<double> x) {
  const std::size_t n = chol.rows();
  assert(b.size() == n && x.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (b[i] - simd::dot(chol.row(i), x.data(), i)) / chol(i, i);
  }
}

void solve_lower_transpose(const Matrix& chol, std::span<const double> b,
                           std::span<double> x) {
  const std::size_t n = chol.rows();
  assert(b.size() == n && x.size() == n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= chol(j, ii) * x[j];
    x[ii] = acc / chol(ii, ii);
  }
}

std::vector<double> solve_cholesky(const Matrix& chol, std::span<const double> b) {
  std::vector<double> tmp(b.size());
  std::vector<double> out(b.size());
  solve_lower(chol, b, tmp);
  solve_lower_transpose(chol, tmp, out);
  return out;
}

}  // namespace mfbo
