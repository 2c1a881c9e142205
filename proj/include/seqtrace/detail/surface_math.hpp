#pragma once

#include <cmath>

// Per-ray surface arithmetic shared by the single-ray tracer and the scalar batch
// kernel. The AVX2 kernel mirrors these expressions operation for operation, so
// any change here must be repeated in src/kernels/trace_avx2.cpp.
namespace seqtrace::detail {

inline constexpr double kGrazingCos = 1e-12;

// Near-vertex root of the conic c(x²+y²+κz²) − 2z = 0 along p + t·d (local frame).
inline bool intersect_local(double c, double kappa, double px, double py, double pz, double dx,
                            double dy, double dz, double& t) {
  const double a = c * (dx * dx + dy * dy + kappa * (dz * dz));
  const double b = c * (px * dx + py * dy + kappa * (pz * dz)) - dz;
  const double cc = c * (px * px + py * py + kappa * (pz * pz)) - 2.0 * pz;
  const double disc = b * b - a * cc;
  if (!(disc >= 0.0)) return false;
  const double sq = std::sqrt(disc);
  const double q = b <= 0.0 ? (sq - b) : (-b - sq);
  if (q == 0.0) return false;
  t = cc / q;
  return true;
}

// Unit surface normal at a local point, oriented along +z at the vertex.
inline void surface_normal(double c, double kappa, double x, double y, double z, double& nx,
                           double& ny, double& nz) {
  const double gx = -(c * x);
  const double gy = -(c * y);
  const double gz = 1.0 - c * (kappa * z);
  const double inv = 1.0 / std::sqrt(gx * gx + gy * gy + gz * gz);
  nx = gx * inv;
  ny = gy * inv;
  nz = gz * inv;
}

// Vector Snell law with the normal already oriented so that cos_i = d·n ≥ 0.
// Returns false on total internal reflection.
inline bool refract_oriented(double dx, double dy, double dz, double nx, double ny, double nz,
                             double cos_i, double mu, double& ox, double& oy, double& oz) {
  const double k = 1.0 - (mu * mu) * (1.0 - cos_i * cos_i);
  if (k < 0.0) return false;
  const double g = std::sqrt(k) - mu * cos_i;
  ox = mu * dx + g * nx;
  oy = mu * dy + g * ny;
  oz = mu * dz + g * nz;
  return true;
}

}  // namespace seqtrace::detail
