#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seqtrace/system.hpp"
#include "seqtrace/vec3.hpp"

namespace seqtrace {

// Straight ray in global coordinates: origin in mm, unit direction, wavelength in µm.
class Ray {
 public:
  // Normalizes the direction; throws InvalidArgument for a zero direction or a
  // non-positive wavelength.
  Ray(Vec3 origin, Vec3 direction, double wavelength_um);

  const Vec3& origin() const { return origin_; }
  const Vec3& direction() const { return direction_; }
  double wavelength() const { return wavelength_; }

 private:
  Vec3 origin_;
  Vec3 direction_;
  double wavelength_;
};

enum class TraceStatus { completed, missed, total_internal_reflection, vignetted };

const char* to_string(TraceStatus status);

struct SurfaceHit {
  Vec3 point;              // global, mm
  Vec3 direction;          // outgoing unit direction
  Vec3 normal;             // unit normal oriented along the incoming direction
  double incidence_angle;  // rad
  double refraction_angle; // rad
  double n_before;
  double n_after;
  double path_length;      // geometric length from the previous point, mm
};

struct TraceResult {
  std::vector<SurfaceHit> records;  // one per surface crossed
  double total_opl = 0.0;           // Σ length × index, mm
  TraceStatus status = TraceStatus::completed;
  std::size_t failed_surface = 0;   // meaningful when status != completed

  bool completed() const { return status == TraceStatus::completed; }
};

struct Intersection {
  Vec3 point;
  double distance;
};

// Throws RayMissesSurface (no real or only a backward intersection, or a grazing
// hit) or Vignetted (radial height beyond the semi-diameter).
Intersection intersect(const Ray& ray, const SurfaceNode& surface, double vertex_z);

// Vector Snell law. The normal may point either way. Throws TotalInternalReflection.
Vec3 refract_direction(const Vec3& incident, const Vec3& normal, double n1, double n2);

// Sequential trace from object space through the image plane. Failures end the
// trace with a terminal status instead of throwing.
TraceResult trace_ray(const LensSystem& system, const Ray& ray);

// Same, with the media indices (system.media(λ)) already evaluated.
TraceResult trace_ray(const LensSystem& system, const Ray& ray, std::span<const double> media);

struct TraceOptions {
  std::size_t last_surface = static_cast<std::size_t>(-1);  // stop after this surface
  bool ignore_apertures = false;
};

TraceResult trace_ray(const LensSystem& system, const Ray& ray, std::span<const double> media,
                      const TraceOptions& options);

}  // namespace seqtrace
