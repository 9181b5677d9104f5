#pragma once

#include <cstddef>

#include "hmlab/types.hpp"

namespace hmlab {

// Thin FFTW wrappers.  Plans are cached per size, created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so planning is deterministic and execution
// works on any buffer.  All transforms run single threaded.

// In-place-capable 2D DFT on an n x n complex grid (row-major).
void fft2(int n, const cplx* in, cplx* out, bool forward);

// 2D DST-I (FFTW RODFT00) on an m x m real block; unnormalized, its own
// inverse up to the factor (2(m+1))^2.
void dst2(int m, const double* in, double* out);

}  // namespace hmlab
