#pragma once

#include "gdpa/simd/kernels.hpp"

namespace gdpa::simd::detail {

#if defined(GDPA_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels();
#endif

#if defined(GDPA_HAVE_NEON_KERNELS)
const KernelTable& neon_kernels();
#endif

}  // namespace gdpa::simd::detail
