#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "variants.hpp"

namespace gdpa::simd {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(GDPA_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(GDPA_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(GDPA_HAVE_AVX2_KERNELS)
    case Isa::Avx2:
      return detail::avx2_kernels();
#endif
#if defined(GDPA_HAVE_NEON_KERNELS)
    case Isa::Neon:
      return detail::neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable* best_available() {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (cpu_supports(isa)) return &table_for(isa);
  }
  return &scalar_kernels();
}

const KernelTable* from_environment() {
  const char* env = std::getenv("GDPA_SIMD");
  if (env == nullptr) return best_available();
  const std::string want{env};
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (want == isa_name(isa)) {
      if (cpu_supports(isa)) return &table_for(isa);
      spdlog::warn("GDPA_SIMD={} is not available on this machine; using the best available", want);
      return best_available();
    }
  }
  if (want != "auto") spdlog::warn("unknown GDPA_SIMD value '{}'; using auto", want);
  return best_available();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{from_environment()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return cpu_supports(isa); }

const KernelTable& kernels_for(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                                "' is not available");
  }
  return table_for(isa);
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void select_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace gdpa::simd
