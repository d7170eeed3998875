#include "hybridode/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "hybridode/errors.hpp"
#include "hybridode/kernels.hpp"

namespace hybridode {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix must be at least 1x1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix must be at least 1x1");
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                         std::to_string(data_.size()) + " entries");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix must be at least 1x1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::string shape_string(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw DimensionError("matvec: matrix " + shape_string(a) + " times vector of length " +
                         std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_string(a) + " times " + shape_string(b));
  }
  Matrix c(a.rows(), b.cols());
  kernels::matmul_parallel(a.entries(), b.entries(), c.entries(), a.rows(), a.cols(), b.cols());
  return c;
}

Vector scale_add(double a, std::span<const double> x, double b, std::span<const double> y) {
  require_same_length(x, y, "scale_add");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + b * y[i];
  return r;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix r = a;
  for (auto& v : r.entries()) v *= s;
  return r;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: " + shape_string(a) + " plus " + shape_string(b));
  }
  Matrix r = a;
  auto re = r.entries();
  auto be = b.entries();
  for (std::size_t i = 0; i < re.size(); ++i) re[i] += be[i];
  return r;
}

Vector concat(std::span<const double> x, std::span<const double> y) {
  Vector r;
  r.reserve(x.size() + y.size());
  r.insert(r.end(), x.begin(), x.end());
  r.insert(r.end(), y.begin(), y.end());
  return r;
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: " + shape_string(a) + " vs " + shape_string(b));
  }
  return max_abs_diff(a.entries(), b.entries());
}

Vector solve(const Matrix& a, std::span<const double> b) {
  if (!a.square()) throw DimensionError("solve: matrix " + shape_string(a) + " is not square");
  if (a.rows() != b.size()) {
    throw DimensionError("solve: matrix " + shape_string(a) + " with right-hand side of length " +
                         std::to_string(b.size()));
  }
  const std::size_t n = a.rows();
  Matrix lu = a;
  Vector x(b.begin(), b.end());
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    if (lu(p, k) == 0.0) throw NumericalError("solve: singular matrix (zero pivot in column " +
                                              std::to_string(k) + ")");
    if (p != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(p).begin());
      std::swap(x[k], x[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x[j];
    x[k] = s / lu(k, k);
  }
  return x;
}

Matrix expm(const Matrix& a, double tol) {
  if (!a.square()) throw DimensionError("expm: matrix " + shape_string(a) + " is not square");
  if (!(tol > 0.0)) throw ConfigError("expm: tolerance must be positive");

  const std::size_t n = a.rows();
  const double norm = norm1(a);
  if (norm == 0.0) return Matrix::identity(n);

  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double theta = std::ldexp(norm, -squarings);
  const Matrix b = scaled(a, std::ldexp(1.0, -squarings));

  // Remainder of the series after order q is bounded by
  // theta^(q+1)/(q+1)! * 1/(1 - theta/(q+2)) <= 2 theta^(q+1)/(q+1)!.
  const double target = std::ldexp(tol, -squarings);
  constexpr int kMaxOrder = 40;
  int order = 1;
  double bound = theta * theta;  // 2 * theta^2 / 2!
  while (bound > target && order < kMaxOrder) {
    ++order;
    bound *= theta / (order + 1);
  }

  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= order; ++k) {
    term = scaled(matmul(term, b), 1.0 / k);
    sum = add(sum, term);
  }
  for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
  return sum;
}

}  // namespace hybridode
