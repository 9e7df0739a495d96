#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gdpa {

/// Dense real vector. Lengths are fixed by whoever constructs it; every
/// operation below checks dimensions and rejects non-finite outputs.
using Vector = std::vector<double>;

using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

/// Row-major dense matrix, used for constraint Jacobians (rows = constraints).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_{rows}, cols_{cols}, data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, Vector data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ConstSpan row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  MutSpan row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

double dot(ConstSpan x, ConstSpan y);
double norm2(ConstSpan x);
double norm2_sq(ConstSpan x);

/// a * x + y
Vector axpy(double a, ConstSpan x, ConstSpan y);
/// y <- y + a * x
void axpy_inplace(double a, ConstSpan x, MutSpan y);

Vector subtract(ConstSpan x, ConstSpan y);
Vector scaled(double a, ConstSpan x);

/// Componentwise max(v, 0).
Vector positive_part(ConstSpan v);

/// J^T v for a row-major m x d matrix and length-m v.
Vector transpose_times(const Matrix& jac, ConstSpan v);
/// J v for a row-major m x d matrix and length-d v.
Vector times(const Matrix& jac, ConstSpan v);

bool all_finite(ConstSpan v);

/// Throws NumericalFailure naming `what` if v holds a NaN or Inf.
void require_finite(ConstSpan v, std::string_view what);
void require_finite(double v, std::string_view what);

/// Throws std::invalid_argument on a length mismatch.
void require_same_size(std::size_t a, std::size_t b, std::string_view what);

}  // namespace gdpa
