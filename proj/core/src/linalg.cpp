#include "newtonflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace newtonflow {
namespace {

template <typename Range>
void require_finite(const Range& values, const char* what) {
  // v * 0 is NaN exactly when v is NaN or Inf.
  double probe = 0.0;
  for (double v : values) probe += v * 0.0;
  if (probe != 0.0) throw NonFiniteError(std::string(what) + " holds a non-finite entry");
}

// Euclidean norm of `values`, rescaled when the plain sum of squares would
// overflow or lose precision to underflow.
template <typename Range>
double euclidean_norm(const Range& values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  if (sum > 1e-280 && sum < 1e280) return std::sqrt(sum);
  double largest = 0.0;
  for (double v : values) largest = std::max(largest, std::abs(v));
  if (largest == 0.0 || !std::isfinite(largest)) return largest;
  double scaled = 0.0;
  for (double v : values) scaled += (v / largest) * (v / largest);
  return largest * std::sqrt(scaled);
}

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("vector dimensions differ: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

}  // namespace

Vector::Vector(std::size_t n) : data_(n, 0.0) {}

Vector::Vector(std::initializer_list<double> values) : data_(values.begin(), values.end()) {
  require_finite(data_, "vector");
}

Vector::Vector(std::span<const double> values) : data_(values.begin(), values.end()) {
  require_finite(data_, "vector");
}

Vector::Vector(Storage values) : data_(std::move(values)) { require_finite(data_, "vector"); }

double Vector::at(std::size_t i) const {
  if (i >= data_.size()) throw std::out_of_range("vector index out of range");
  return data_[i];
}

Vector Vector::with(std::size_t i, double value) const {
  Storage copy = data_;
  copy.at(i) = value;
  return Vector(std::move(copy));
}

double Vector::norm() const noexcept { return euclidean_norm(data_); }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Vector operator+(const Vector& a, const Vector& b) { return axpy(a, 1.0, b); }

Vector operator-(const Vector& a, const Vector& b) { return axpy(a, -1.0, b); }

Vector operator-(const Vector& a) { return -1.0 * a; }

Vector operator*(double s, const Vector& a) {
  Vector::Storage out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return Vector(std::move(out));
}

Vector operator*(const Vector& a, double s) { return s * a; }

Vector operator/(const Vector& a, double s) {
  Vector::Storage out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / s;
  return Vector(std::move(out));
}

Vector axpy(const Vector& a, double s, const Vector& b) {
  require_same_size(a, b);
  Vector::Storage out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return Vector(std::move(out));
}

double distance(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  if (sum > 1e-280 && sum < 1e280) return std::sqrt(sum);
  Vector::Storage diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return euclidean_norm(diff);
}

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()) {
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_, "matrix");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Storage row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix storage does not match its shape");
  require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Storage data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return Matrix(n, n, std::move(data));
}

double Matrix::column_norm(std::size_t j) const {
  Vector::Storage column(rows_);
  for (std::size_t i = 0; i < rows_; ++i) column[i] = (*this)(i, j);
  return euclidean_norm(column);
}

double Matrix::induced_norm() const {
  if (data_.empty()) return 0.0;
  // Power iteration on A^T A; the start vector is deliberately non-uniform.
  const Matrix gram = transpose(*this) * (*this);
  Vector::Storage start(cols_);
  for (std::size_t j = 0; j < cols_; ++j) start[j] = 1.0 + 0.1 * static_cast<double>(j);
  Vector v(std::move(start));
  double lambda = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const Vector w = gram * v;
    const double norm_w = w.norm();
    if (norm_w == 0.0) return 0.0;
    const double next = dot(v, w) / dot(v, v);
    v = w / norm_w;
    if (std::abs(next - lambda) <= 1e-15 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector dimensions differ");
  Vector::Storage out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * x[j];
    out[i] = sum;
  }
  return Vector(std::move(out));
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix-matrix dimensions differ");
  Matrix::Storage out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out[i * b.cols() + j] += a(i, k) * b(k, j);
  return Matrix(a.rows(), b.cols(), std::move(out));
}

Matrix transpose(const Matrix& a) {
  Matrix::Storage out(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j * a.rows() + i] = a(i, j);
  return Matrix(a.cols(), a.rows(), std::move(out));
}

double determinant(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  Matrix::Storage m(a.values().begin(), a.values().end());
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
    if (m[p * n + k] == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      det = -det;
    }
    det *= m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= factor * m[k * n + j];
    }
  }
  return det;
}

LuFactorization::LuFactorization(const Matrix& a) : n_(a.rows()), lu_(a.values().begin(), a.values().end()) {
  if (!a.square()) throw std::invalid_argument("LU factorization of a non-square matrix");

  double scale_sq = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) sum += lu_[i * n_ + j] * lu_[i * n_ + j];
    scale_sq = std::max(scale_sq, sum);
  }
  double scale = std::sqrt(scale_sq);
  if (!(scale_sq > 1e-280 && scale_sq < 1e280)) {
    scale = 0.0;
    for (std::size_t j = 0; j < n_; ++j) scale = std::max(scale, a.column_norm(j));
  }
  const double threshold = kPivotTolerance * scale;

  perm_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n_; ++i)
      if (std::abs(lu_[i * n_ + k]) > std::abs(lu_[p * n_ + k])) p = i;
    if (!(std::abs(lu_[p * n_ + k]) > threshold)) {
      throw SingularMatrixError("pivot " + std::to_string(k) + " below singularity threshold");
    }
    if (p != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[p * n_ + j]);
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_[k * n_ + k];
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double factor = lu_[i * n_ + k] / pivot;
      lu_[i * n_ + k] = factor;
      for (std::size_t j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= factor * lu_[k * n_ + j];
    }
  }
}

Vector LuFactorization::solve(const Vector& b) const {
  if (b.size() != n_) throw std::invalid_argument("right-hand side does not conform to the factorization");
  Vector::Storage y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) sum -= lu_[i * n_ + j] * y[j];
    y[i] = sum;
  }
  for (std::size_t i = n_; i-- > 0;) {
    double sum = y[i];
    for (std::size_t j = i + 1; j < n_; ++j) sum -= lu_[i * n_ + j] * y[j];
    y[i] = sum / lu_[i * n_ + i];
  }
  return Vector(std::move(y));
}

Vector solve_linear(const Matrix& a, const Vector& b) { return LuFactorization(a).solve(b); }

}  // namespace newtonflow
