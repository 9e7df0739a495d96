#include <arm_neon.h>

#include <cmath>

#include "variants.hpp"

namespace gdpa::simd::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    a1 = vaddq_f64(a1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq(const double* x, std::size_t n) { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

// vmaxq_f64 propagates NaN and orders signed zeros; a compare-and-select keeps
// the exact scalar semantics.
void positive_part(const double* x, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(zero, v), zero, v));
  }
  for (; i < n; ++i) out[i] = (0.0 > x[i]) ? 0.0 : x[i];
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    const float64x2_t l = vld1q_f64(lo + i);
    const float64x2_t h = vld1q_f64(hi + i);
    const float64x2_t t = vbslq_f64(vcgtq_f64(l, v), l, v);
    vst1q_f64(out + i, vbslq_f64(vcltq_f64(h, t), h, t));
  }
  for (; i < n; ++i) {
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

const KernelTable& neon_kernels() {
  static constexpr KernelTable table{
      Isa::Neon, "neon", dot, sum_sq, axpy, sub, positive_part, clamp, all_finite};
  return table;
}

}  // namespace gdpa::simd::detail
