#include <cmath>

#include "gdpa/simd/kernels.hpp"

namespace gdpa::simd {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void positive_part(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (0.0 > x[i]) ? 0.0 : x[i];
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (lo[i] > x[i]) ? lo[i] : x[i];
    out[i] = (hi[i] < t) ? hi[i] : t;
  }
}

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static constexpr KernelTable table{
      Isa::Scalar, "scalar", dot, sum_sq, axpy, sub, positive_part, clamp, all_finite};
  return table;
}

}  // namespace gdpa::simd
