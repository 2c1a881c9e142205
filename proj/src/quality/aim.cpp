#include "seqtrace/aim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqtrace/error.hpp"
#include "seqtrace/paraxial.hpp"

namespace seqtrace {

namespace {

constexpr double kAimTolerance = 1e-9;
constexpr int kMaxAimIterations = 60;

double entrance_pupil_z(const LensSystem& system) {
  const auto ladder_a = paraxial_trace(system, 0.0, 1.0, system.primary_wavelength());
  const auto ladder_b = paraxial_trace(system, 1.0, 0.0, system.primary_wavelength());
  const std::size_t s = system.stop_index();
  if (ladder_b[s].y == 0.0) return 0.0;
  return ladder_a[s].y / ladder_b[s].y;
}

double launch_offset(const LensSystem& system, const Vec3& direction, double pupil_z,
                     double height) {
  // Back far enough that the whole beam starts ahead of the first surface's sag.
  const double dz = std::max(direction.z, 1e-6);
  return (std::max(pupil_z, 0.0) + height + 1.0) / dz + system.entrance_pupil_diameter();
}

}  // namespace

Vec3 LaunchFrame::pupil_point(double px, double py) const {
  return {pupil_center.x + px * pupil_radius, pupil_center.y + py * pupil_radius, pupil_center.z};
}

Vec3 LaunchFrame::origin(double px, double py) const {
  const Vec3 p = pupil_point(px, py);
  const Vec3 w0 = pupil_center - wavefront_offset * direction;
  return p - dot(p - w0, direction) * direction;
}

Ray LaunchFrame::ray(double px, double py, double wavelength_um) const {
  return Ray(origin(px, py), direction, wavelength_um);
}

Vec3 field_direction(double field_deg) {
  const double a = field_deg * std::numbers::pi / 180.0;
  return {0.0, std::sin(a), std::cos(a)};
}

LaunchFrame paraxial_launch(const LensSystem& system, const Vec3& direction) {
  const Vec3 d = normalized(direction);
  if (!(d.z > 0.0)) throw Error(ErrorKind::invalid_argument, "launch direction must have +z component");
  const double zp = entrance_pupil_z(system);
  const double r = 0.5 * system.entrance_pupil_diameter();
  const double tx = d.x / d.z, ty = d.y / d.z;
  const double reach = std::hypot(tx, ty) * (std::abs(zp) + 1.0) + 2.0 * r + 1.0;
  return {d, {0.0, 0.0, zp}, r, launch_offset(system, d, zp, reach)};
}

LaunchFrame aim_chief_ray(const LensSystem& system, double field_deg, double wavelength_um) {
  LaunchFrame frame = paraxial_launch(system, field_direction(field_deg));
  if (field_deg == 0.0) return frame;
  const auto media = system.media(wavelength_um);
  const TraceOptions options{system.stop_index(), true};

  auto residual = [&](const LaunchFrame& f, double& ex, double& ey) {
    const TraceResult r = trace_ray(system, f.ray(0.0, 0.0, wavelength_um), media, options);
    if (!r.completed()) return false;
    const Vec3& hit = r.records.back().point;
    ex = hit.x;
    ey = hit.y;
    return true;
  };

  double ex = 0.0, ey = 0.0;
  if (!residual(frame, ex, ey))
    throw Error(ErrorKind::aiming_failure, "chief ray cannot reach the stop");
  const double h = 1e-7 * std::max(frame.pupil_radius, 1e-3);
  for (int iter = 0; iter < kMaxAimIterations; ++iter) {
    const double err = std::hypot(ex, ey);
    if (err <= 1e-13) break;
    // Forward-difference Jacobian of the stop intercept w.r.t. the pupil intercept.
    LaunchFrame fx = frame, fy = frame;
    fx.pupil_center.x += h;
    fy.pupil_center.y += h;
    double xx, xy, yx, yy;
    if (!residual(fx, xx, xy) || !residual(fy, yx, yy))
      throw Error(ErrorKind::aiming_failure, "chief ray aiming left the traceable region");
    const double j00 = (xx - ex) / h, j10 = (xy - ey) / h;
    const double j01 = (yx - ex) / h, j11 = (yy - ey) / h;
    const double det = j00 * j11 - j01 * j10;
    if (!(std::abs(det) > 0.0)) throw Error(ErrorKind::aiming_failure, "singular aiming Jacobian");
    const double sx = -(j11 * ex - j01 * ey) / det;
    const double sy = -(-j10 * ex + j00 * ey) / det;
    bool improved = false;
    for (double step = 1.0; step > 1e-6; step *= 0.5) {
      LaunchFrame trial = frame;
      trial.pupil_center.x += step * sx;
      trial.pupil_center.y += step * sy;
      double tx, ty;
      if (residual(trial, tx, ty) && std::hypot(tx, ty) < err) {
        frame = trial;
        ex = tx;
        ey = ty;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (std::hypot(ex, ey) > kAimTolerance)
    throw Error(ErrorKind::aiming_failure, "chief ray aiming did not converge");
  return frame;
}

}  // namespace seqtrace
