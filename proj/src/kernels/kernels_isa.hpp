#pragma once

#include "lot/kernels.hpp"

// Internal bridge between the dispatcher and the ISA-specific translation
// units (each compiled with its own target flags).
namespace lot::kernels {

#ifdef LOT_HAVE_AVX2_TU
const KernelTable& avx2_table();
#endif

#ifdef LOT_HAVE_NEON_TU
const KernelTable& neon_table();
#endif

}  // namespace lot::kernels
