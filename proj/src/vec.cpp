#include "gdpa/vec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gdpa/errors.hpp"
#include "gdpa/simd/kernels.hpp"

namespace gdpa {

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_{rows}, cols_{cols}, data_{std::move(data)} {
  require_same_size(data_.size(), rows * cols, "matrix storage");
}

void require_same_size(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

bool all_finite(ConstSpan v) { return simd::active_kernels().all_finite(v.data(), v.size()); }

void require_finite(ConstSpan v, std::string_view what) {
  if (!all_finite(v)) throw NumericalFailure(std::string(what) + ": non-finite value");
}

void require_finite(double v, std::string_view what) {
  if (!std::isfinite(v)) throw NumericalFailure(std::string(what) + ": non-finite value");
}

double dot(ConstSpan x, ConstSpan y) {
  require_same_size(x.size(), y.size(), "dot");
  const double out = simd::active_kernels().dot(x.data(), y.data(), x.size());
  require_finite(out, "dot");
  return out;
}

double norm2_sq(ConstSpan x) {
  const double out = simd::active_kernels().sum_sq(x.data(), x.size());
  require_finite(out, "norm2");
  return out;
}

double norm2(ConstSpan x) { return std::sqrt(norm2_sq(x)); }

void axpy_inplace(double a, ConstSpan x, MutSpan y) {
  require_same_size(x.size(), y.size(), "axpy");
  simd::active_kernels().axpy(a, x.data(), y.data(), x.size());
  require_finite(ConstSpan{y}, "axpy");
}

Vector axpy(double a, ConstSpan x, ConstSpan y) {
  Vector out(y.begin(), y.end());
  axpy_inplace(a, x, out);
  return out;
}

Vector subtract(ConstSpan x, ConstSpan y) {
  require_same_size(x.size(), y.size(), "subtract");
  Vector out(x.size());
  simd::active_kernels().sub(x.data(), y.data(), out.data(), x.size());
  require_finite(out, "subtract");
  return out;
}

Vector scaled(double a, ConstSpan x) {
  Vector out(x.size(), 0.0);
  axpy_inplace(a, x, out);
  return out;
}

Vector positive_part(ConstSpan v) {
  Vector out(v.size());
  simd::active_kernels().positive_part(v.data(), out.data(), v.size());
  require_finite(out, "positive_part");
  return out;
}

Vector transpose_times(const Matrix& jac, ConstSpan v) {
  require_same_size(jac.rows(), v.size(), "transpose_times");
  Vector out(jac.cols(), 0.0);
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < jac.rows(); ++i) {
    if (v[i] == 0.0) continue;
    k.axpy(v[i], jac.row(i).data(), out.data(), out.size());
  }
  require_finite(out, "transpose_times");
  return out;
}

Vector times(const Matrix& jac, ConstSpan v) {
  require_same_size(jac.cols(), v.size(), "times");
  Vector out(jac.rows());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < jac.rows(); ++i) out[i] = k.dot(jac.row(i).data(), v.data(), v.size());
  require_finite(out, "times");
  return out;
}

}  // namespace gdpa
