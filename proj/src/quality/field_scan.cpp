#include "seqtrace/field_scan.hpp"

#include <cmath>

#include "seqtrace/aim.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/paraxial.hpp"
#include "seqtrace/trace.hpp"

namespace seqtrace {

namespace {

// Vergence after a transfer of length d: 1/(1/v − d).
double transfer(double v, double d) { return v / (1.0 - d * v); }

double focus_distance(double v) { return v == 0.0 ? HUGE_VAL : 1.0 / v; }

}  // namespace

FieldPoint field_point(const LensSystem& system, double field_deg) {
  const double wl = system.primary_wavelength();
  const LaunchFrame frame = aim_chief_ray(system, field_deg, wl);
  const TraceResult chief = trace_ray(system, frame.ray(0.0, 0.0, wl));
  if (!chief.completed())
    throw Error(ErrorKind::aiming_failure, "chief ray does not reach the image plane");

  // Sagittal and tangential vergences (1/distance along the ray); 0 for a
  // collimated object beam.
  double vs = 0.0, vt = 0.0;
  for (std::size_t i = 0; i < chief.records.size(); ++i) {
    const SurfaceHit& h = chief.records[i];
    if (i > 0) {
      vs = transfer(vs, h.path_length);
      vt = transfer(vt, h.path_length);
    }
    if (i == system.image_index()) break;
    const Profile& profile = system.surface(i).profile;
    const double r = std::hypot(h.point.x, h.point.y);
    const double ci = std::cos(h.incidence_angle);
    const double cr = std::cos(h.refraction_angle);
    const double bend = h.n_after * cr - h.n_before * ci;
    const double phi_s = profile.sagittal_curvature(r) * bend;
    const double phi_t = profile.meridional_curvature(r) * bend;
    vs = (h.n_before * vs + phi_s) / h.n_after;
    vt = (h.n_before * ci * ci * vt + phi_t) / (h.n_after * cr * cr);
  }
  const SurfaceHit& last = chief.records.back();
  const double dz = last.direction.z;

  FieldPoint p;
  p.field_deg = field_deg;
  p.sagittal_shift_mm = focus_distance(vs) * dz;
  p.tangential_shift_mm = focus_distance(vt) * dz;
  p.real_height_mm = last.point.y;
  const ParaxialRayStart c = chief_ray_start(system, field_deg, wl);
  p.paraxial_height_mm = paraxial_trace(system, c.y, c.u, wl).back().y;
  p.distortion_percent =
      field_deg == 0.0 ? 0.0
                       : 100.0 * (p.real_height_mm - p.paraxial_height_mm) / p.paraxial_height_mm;
  return p;
}

FieldScan field_curves_distortion(const LensSystem& system, int samples) {
  if (samples < 2) throw Error(ErrorKind::invalid_argument, "field scan needs at least 2 samples");
  FieldScan scan{system.primary_wavelength(), {}};
  const double fmax = system.max_field();
  for (int k = 0; k < samples; ++k) {
    const double f = k == samples - 1 ? fmax : fmax * k / (samples - 1);
    scan.points.push_back(field_point(system, f));
  }
  return scan;
}

}  // namespace seqtrace
