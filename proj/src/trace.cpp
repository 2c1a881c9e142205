#include "seqtrace/trace.hpp"

#include <cmath>

#include "seqtrace/detail/surface_math.hpp"
#include "seqtrace/error.hpp"

namespace seqtrace {

namespace {

// Tolerance for coincident vertices (zero-thickness gaps).
constexpr double kBackwardTolerance = 1e-9;

enum class HitOutcome { ok, missed, vignetted };

struct LocalHit {
  HitOutcome outcome;
  Vec3 point;  // global
  double distance;
};

LocalHit find_hit(const Vec3& origin, const Vec3& d, const SurfaceNode& surface, double vertex_z,
                  bool ignore_aperture = false) {
  const double c = surface.profile.curvature();
  const double kappa = 1.0 + surface.profile.conic_constant();
  double t = 0.0;
  if (!detail::intersect_local(c, kappa, origin.x, origin.y, origin.z - vertex_z, d.x, d.y, d.z, t) ||
      !std::isfinite(t) || t < -kBackwardTolerance)
    return {HitOutcome::missed, {}, 0.0};
  const Vec3 p = origin + t * d;
  const double r2 = p.x * p.x + p.y * p.y;
  if (!ignore_aperture && r2 > surface.semi_diameter * surface.semi_diameter) return {HitOutcome::vignetted, p, t};
  return {HitOutcome::ok, p, t};
}

}  // namespace

Ray::Ray(Vec3 origin, Vec3 direction, double wavelength_um)
    : origin_(origin), direction_(direction), wavelength_(wavelength_um) {
  const double len = norm(direction);
  if (!(len > 0.0) || !std::isfinite(len))
    throw Error(ErrorKind::invalid_argument, "ray direction must be non-zero");
  if (!(wavelength_um > 0.0)) throw Error(ErrorKind::invalid_argument, "wavelength must be > 0");
  direction_ = direction / len;
}

const char* to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::completed: return "completed";
    case TraceStatus::missed: return "missed";
    case TraceStatus::total_internal_reflection: return "tir";
    case TraceStatus::vignetted: return "vignetted";
  }
  return "?";
}

Intersection intersect(const Ray& ray, const SurfaceNode& surface, double vertex_z) {
  const LocalHit hit = find_hit(ray.origin(), ray.direction(), surface, vertex_z);
  if (hit.outcome == HitOutcome::missed || hit.distance < 0.0)
    throw Error(ErrorKind::ray_misses_surface, "ray misses surface");
  if (hit.outcome == HitOutcome::vignetted)
    throw Error(ErrorKind::vignetted, "ray falls outside the clear aperture");
  double nx, ny, nz;
  detail::surface_normal(surface.profile.curvature(), 1.0 + surface.profile.conic_constant(),
                         hit.point.x, hit.point.y, hit.point.z - vertex_z, nx, ny, nz);
  if (std::abs(dot(ray.direction(), Vec3{nx, ny, nz})) < detail::kGrazingCos)
    throw Error(ErrorKind::ray_misses_surface, "grazing incidence");
  return {hit.point, hit.distance};
}

Vec3 refract_direction(const Vec3& incident, const Vec3& normal, double n1, double n2) {
  Vec3 n = normal;
  double cos_i = dot(incident, n);
  if (cos_i < 0.0) {
    n = -n;
    cos_i = -cos_i;
  }
  Vec3 out;
  if (!detail::refract_oriented(incident.x, incident.y, incident.z, n.x, n.y, n.z, cos_i, n1 / n2,
                                out.x, out.y, out.z))
    throw Error(ErrorKind::total_internal_reflection, "total internal reflection");
  return out;
}

TraceResult trace_ray(const LensSystem& system, const Ray& ray) {
  const auto media = system.media(ray.wavelength());
  return trace_ray(system, ray, media);
}

TraceResult trace_ray(const LensSystem& system, const Ray& ray, std::span<const double> media) {
  return trace_ray(system, ray, media, TraceOptions{});
}

TraceResult trace_ray(const LensSystem& system, const Ray& ray, std::span<const double> media,
                      const TraceOptions& options) {
  TraceResult result;
  result.records.reserve(system.size());
  Vec3 p = ray.origin();
  Vec3 d = ray.direction();
  double n_before = 1.0;
  const std::size_t end =
      options.last_surface < system.size() ? options.last_surface + 1 : system.size();
  for (std::size_t i = 0; i < end; ++i) {
    const SurfaceNode& surface = system.surface(i);
    const double vz = system.vertex_z(i);
    const LocalHit hit = find_hit(p, d, surface, vz, options.ignore_apertures);
    if (hit.outcome != HitOutcome::ok) {
      result.status = hit.outcome == HitOutcome::missed ? TraceStatus::missed : TraceStatus::vignetted;
      result.failed_surface = i;
      return result;
    }
    const double c = surface.profile.curvature();
    const double kappa = 1.0 + surface.profile.conic_constant();
    Vec3 n;
    detail::surface_normal(c, kappa, hit.point.x, hit.point.y, hit.point.z - vz, n.x, n.y, n.z);
    double cos_i = dot(d, n);
    if (cos_i < 0.0) {
      n = -n;
      cos_i = -cos_i;
    }
    if (cos_i < detail::kGrazingCos) {
      result.status = TraceStatus::missed;
      result.failed_surface = i;
      return result;
    }
    const double n_after = media[i];
    Vec3 out;
    if (!detail::refract_oriented(d.x, d.y, d.z, n.x, n.y, n.z, cos_i, n_before / n_after, out.x,
                                  out.y, out.z)) {
      result.status = TraceStatus::total_internal_reflection;
      result.failed_surface = i;
      return result;
    }
    result.total_opl += n_before * hit.distance;
    result.records.push_back({hit.point, out, n, std::atan2(norm(cross(d, n)), cos_i),
                              std::atan2(norm(cross(out, n)), dot(out, n)), n_before, n_after,
                              hit.distance});
    p = hit.point;
    d = out;
    n_before = n_after;
  }
  return result;
}

}  // namespace seqtrace
