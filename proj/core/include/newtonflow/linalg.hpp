#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

#include <boost/container/small_vector.hpp>

namespace newtonflow {

/// Thrown when a vector, matrix, or evaluator output holds a NaN or Inf entry.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the LU factorization when a pivot falls below the singularity threshold.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense real vector. Every entry is finite; construction fails otherwise.
class Vector {
 public:
  using Storage = boost::container::small_vector<double, 4>;

  Vector() = default;
  explicit Vector(std::size_t n);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::span<const double> values);
  explicit Vector(Storage values);

  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return data_[i]; }
  [[nodiscard]] double at(std::size_t i) const;
  [[nodiscard]] std::span<const double> values() const noexcept { return {data_.data(), data_.size()}; }

  /// Returns a copy with entry i replaced.
  [[nodiscard]] Vector with(std::size_t i, double value) const;

  [[nodiscard]] double norm() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  Storage data_;
};

[[nodiscard]] double dot(const Vector& a, const Vector& b);
[[nodiscard]] Vector operator+(const Vector& a, const Vector& b);
[[nodiscard]] Vector operator-(const Vector& a, const Vector& b);
[[nodiscard]] Vector operator-(const Vector& a);
[[nodiscard]] Vector operator*(double s, const Vector& a);
[[nodiscard]] Vector operator*(const Vector& a, double s);
[[nodiscard]] Vector operator/(const Vector& a, double s);
/// a + s*b without the intermediate temporary.
[[nodiscard]] Vector axpy(const Vector& a, double s, const Vector& b);
[[nodiscard]] double distance(const Vector& a, const Vector& b);

/// Dense row-major real matrix with finite entries.
class Matrix {
 public:
  using Storage = boost::container::small_vector<double, 16>;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  /// Row-wise literal, e.g. Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  Matrix(std::size_t rows, std::size_t cols, Storage row_major);

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return {data_.data(), data_.size()}; }

  /// Operator norm induced by the Euclidean vector norm (largest singular value).
  [[nodiscard]] double induced_norm() const;
  [[nodiscard]] double column_norm(std::size_t j) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage data_;
};

[[nodiscard]] Vector operator*(const Matrix& a, const Vector& x);
[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix transpose(const Matrix& a);

/// Determinant by Gaussian elimination with partial pivoting; no singularity threshold.
[[nodiscard]] double determinant(const Matrix& a);

/// LU factorization with partial pivoting, PA = LU.
///
/// A pivot whose magnitude is at most kPivotTolerance times the largest column
/// norm of the input is treated as zero and construction throws
/// SingularMatrixError.
class LuFactorization {
 public:
  static constexpr double kPivotTolerance = 1e-14;

  explicit LuFactorization(const Matrix& a);

  [[nodiscard]] std::size_t dim() const noexcept { return n_; }
  [[nodiscard]] Vector solve(const Vector& b) const;

 private:
  std::size_t n_ = 0;
  Matrix::Storage lu_;
  boost::container::small_vector<std::size_t, 4> perm_;
};

/// Solves a*y = b without forming the inverse.
[[nodiscard]] Vector solve_linear(const Matrix& a, const Vector& b);

}  // namespace newtonflow
