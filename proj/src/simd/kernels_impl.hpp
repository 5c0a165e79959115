#pragma once

#include "pulsedtls/simd/kernels.hpp"

namespace pulsedtls::simd {

#if defined(PULSEDTLS_HAVE_AVX2_TU)
/// Defined in kernels_avx2.cpp (compiled with -mavx2 -mfma); only call after
/// checking the CPU.
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace pulsedtls::simd
