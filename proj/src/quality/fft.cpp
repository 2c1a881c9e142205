#include "seqtrace/detail/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace seqtrace::detail {

namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex g_planner;

void run(std::vector<std::complex<double>>& data, int rows, int cols, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(g_planner);
    plan = fftw_plan_dft_2d(rows, cols, p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(g_planner);
  fftw_destroy_plan(plan);
}

}  // namespace

void fft2d(std::vector<std::complex<double>>& data, int rows, int cols) {
  run(data, rows, cols, FFTW_FORWARD);
}

void ifft2d(std::vector<std::complex<double>>& data, int rows, int cols) {
  run(data, rows, cols, FFTW_BACKWARD);
}

}  // namespace seqtrace::detail
