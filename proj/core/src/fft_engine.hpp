#pragma once

#include <complex>

#include "nlch/torus_grid.hpp"

namespace nlch::detail {

// FFTW-backed transforms between row-major real arrays and half-complex spectra.
// Forward output is scaled by 1/N (coefficient convention); inverse is the plain
// unnormalized c2r, so inverse(forward(x)) == x. Thread-safe: plan creation is
// serialized, execution uses per-call buffers.
void fft_forward(const TorusGrid& g, const double* in, std::complex<double>* out);
void fft_inverse(const TorusGrid& g, const std::complex<double>* in, double* out);

} // namespace nlch::detail
