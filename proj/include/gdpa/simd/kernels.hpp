#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Dense double-precision kernels with one scalar reference implementation and
// optional vectorized variants chosen at runtime.
//
// Elementwise kernels (axpy, positive_part, clamp, sub) never fuse a multiply
// and an add, so every variant produces the same bits as the scalar one.
// Reductions (dot, sum_sq) reassociate and agree with the scalar result only
// up to rounding.

namespace gdpa::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  std::string_view name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  /// y <- y + a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out <- x - y
  void (*sub)(const double* x, const double* y, double* out, std::size_t n);
  /// out <- max(x, 0)
  void (*positive_part)(const double* x, double* out, std::size_t n);
  /// out <- min(max(x, lo), hi)
  void (*clamp)(const double* x, const double* lo, const double* hi, double* out,
                std::size_t n);
  bool (*all_finite)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

/// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Throws std::invalid_argument when the variant is unavailable.
const KernelTable& kernels_for(Isa isa);

/// The table every vec-core operation dispatches through. On first use it is
/// chosen from GDPA_SIMD (scalar|avx2|neon|auto, default auto = best available).
const KernelTable& active_kernels();

/// Overrides the active table. Intended for tests and benchmarks.
void select_isa(Isa isa);

std::vector<Isa> available_isas();

std::string_view isa_name(Isa isa);

}  // namespace gdpa::simd
