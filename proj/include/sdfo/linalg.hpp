#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdfo {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sized for derivative-free problems
/// (n up to a few hundred), not for large-scale work.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  Vector column(std::size_t j) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y
Vector scaled(double alpha, std::span<const double> x);
Vector matvec(const Matrix& a, std::span<const double> x);
/// x^T A x
double quadratic_form(const Matrix& a, std::span<const double> x);

bool all_finite(std::span<const double> v);
/// Largest |A_ij - A_ji|.
double asymmetry(const Matrix& a);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column j pairs with values[j]
};

/// Cyclic Jacobi rotations, swept until the off-diagonal mass is at
/// machine-precision level relative to the Frobenius norm.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Q diag(values) Q^T, symmetrized.
Matrix reconstruct(const Matrix& vectors, std::span<const double> values);

}  // namespace sdfo
