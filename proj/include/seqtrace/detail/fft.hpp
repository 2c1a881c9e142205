#pragma once

#include <complex>
#include <vector>

namespace seqtrace::detail {

// In-place forward 2-D DFT of a rows×cols row-major complex array (FFTW,
// estimate-mode plans so results do not depend on planner timing).
void fft2d(std::vector<std::complex<double>>& data, int rows, int cols);
void ifft2d(std::vector<std::complex<double>>& data, int rows, int cols);  // unnormalized

}  // namespace seqtrace::detail
