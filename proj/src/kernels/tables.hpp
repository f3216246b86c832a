#pragma once

#include "posecal/kernels.hpp"

namespace posecal::kernels {

extern const Kernels kScalarKernels;
#ifdef POSECAL_HAVE_AVX2
extern const Kernels kAvx2Kernels;
#endif

}  // namespace posecal::kernels
