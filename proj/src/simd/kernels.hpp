#pragma once

#include "saltus/simd.hpp"

namespace saltus::simd::detail {

const KernelTable& scalar_table() noexcept;
#if defined(SALTUS_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(SALTUS_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif

}  // namespace saltus::simd::detail
