#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hybridode {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Always at least 1x1.
class Matrix {
public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> entries() { return data_; }
  std::span<const double> entries() const { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

std::string shape_string(const Matrix& a);

Vector matvec(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);

/// a*x + b*y elementwise.
Vector scale_add(double a, std::span<const double> x, double b, std::span<const double> y);
Matrix scaled(const Matrix& a, double s);
Matrix add(const Matrix& a, const Matrix& b);

/// x followed by y.
Vector concat(std::span<const double> x, std::span<const double> y);

double norm1(const Matrix& a);  // max column sum
double frobenius(const Matrix& a);
double norm_inf(std::span<const double> x);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Solves a*z = b by LU with partial pivoting. Throws NumericalError when a
/// pivot vanishes.
Vector solve(const Matrix& a, std::span<const double> b);

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The matrix is scaled by 2^-s so that its 1-norm is at most 1/2, then the
/// series is truncated at the first order q whose remainder bound drops below
/// tol * 2^-s (squaring s times amplifies relative error by about 2^s).
/// expm of the zero matrix returns the identity exactly.
Matrix expm(const Matrix& a, double tol = 1e-12);

}  // namespace hybridode
