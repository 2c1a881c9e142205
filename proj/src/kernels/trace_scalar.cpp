#include <cmath>

#include "seqtrace/detail/surface_math.hpp"
#include "seqtrace/kernels_raw.hpp"

namespace seqtrace::kernels {

namespace {
constexpr double kBackwardTolerance = 1e-9;
}

void trace_batch_scalar(const SurfaceConstants* surfaces, std::size_t surface_count, RawBatch r) {
  for (std::size_t s = 0; s < surface_count; ++s) {
    const SurfaceConstants& k = surfaces[s];
    const double mu = k.n_before / k.n_after;
    for (std::size_t i = 0; i < r.count; ++i) {
      if (r.status[i] != 0) continue;
      const double x = r.x[i], y = r.y[i], z = r.z[i];
      const double dx = r.dx[i], dy = r.dy[i], dz = r.dz[i];
      double t = 0.0;
      if (!detail::intersect_local(k.curvature, k.kappa, x, y, z - k.vertex_z, dx, dy, dz, t) ||
          !(std::abs(t) < HUGE_VAL) || !(t >= -kBackwardTolerance)) {
        r.status[i] = 1;
        r.failed_surface[i] = static_cast<std::int32_t>(s);
        continue;
      }
      const double hx = x + t * dx;
      const double hy = y + t * dy;
      const double hz = z + t * dz;
      if (hx * hx + hy * hy > k.semi_diameter_sq) {
        r.status[i] = 3;
        r.failed_surface[i] = static_cast<std::int32_t>(s);
        continue;
      }
      double nx, ny, nz;
      detail::surface_normal(k.curvature, k.kappa, hx, hy, hz - k.vertex_z, nx, ny, nz);
      double cos_i = dx * nx + dy * ny + dz * nz;
      if (cos_i < 0.0) {
        nx = -nx;
        ny = -ny;
        nz = -nz;
        cos_i = -cos_i;
      }
      if (cos_i < detail::kGrazingCos) {
        r.status[i] = 1;
        r.failed_surface[i] = static_cast<std::int32_t>(s);
        continue;
      }
      double ox, oy, oz;
      if (!detail::refract_oriented(dx, dy, dz, nx, ny, nz, cos_i, mu, ox, oy, oz)) {
        r.status[i] = 2;
        r.failed_surface[i] = static_cast<std::int32_t>(s);
        continue;
      }
      r.opl[i] += k.n_before * t;
      r.x[i] = hx;
      r.y[i] = hy;
      r.z[i] = hz;
      r.dx[i] = ox;
      r.dy[i] = oy;
      r.dz[i] = oz;
    }
  }
}

}  // namespace seqtrace::kernels
