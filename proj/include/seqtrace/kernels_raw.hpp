#pragma once

#include <cstddef>
#include <cstdint>

// Plain-data interface between the dispatcher and the ISA-specific kernels.
// Kept free of standard-library templates so the AVX2 translation unit emits no
// inline code the linker could share with baseline-ISA objects.
namespace seqtrace::kernels {

struct SurfaceConstants {
  double vertex_z;
  double curvature;
  double kappa;  // 1 + conic constant
  double semi_diameter_sq;
  double n_before;
  double n_after;
};

struct RawBatch {
  double* x;
  double* y;
  double* z;
  double* dx;
  double* dy;
  double* dz;
  double* opl;
  std::int32_t* status;
  std::int32_t* failed_surface;
  std::size_t count;
};

void trace_batch_scalar(const SurfaceConstants* surfaces, std::size_t surface_count, RawBatch rays);
void trace_batch_avx2(const SurfaceConstants* surfaces, std::size_t surface_count, RawBatch rays);

}  // namespace seqtrace::kernels
