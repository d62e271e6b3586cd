#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfbo {

// Dense row-major matrix of doubles. Small sizes only (observation counts
// and action-space dimensions), so no blocking or views.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const double> row_span(std::size_t r) const { return {row(r), cols_}; }
  std::span<double> row_span(std::size_t r) { return {row(r), cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix&) const = default;

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// In-place Cholesky of a symmetric matrix, reading the lower triangle.
// On success the lower triangle holds L with A = L L^T and the strict upper
// triangle is zeroed. Returns false on a non-positive pivot (input is left
// partially overwritten).
bool cholesky_lower_inplace(Matrix& a);

// Forward substitution: L x = b.
void solve_lower(const Matrix& chol, std::span<const double> b, std::span<double> x);

// Backward substitution: L^T x = b.
void solve_lower_transpose(const Matrix& chol, std::span<const double> b, std::span<double> x);

// (L L^T) x = b given the Cholesky factor.
std::vector<double> solve_cholesky(const Matrix& chol, std::span<const double> b);

}  // namespace mfbo
