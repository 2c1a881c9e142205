#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "seqtrace/glass.hpp"
#include "seqtrace/system.hpp"
#include "seqtrace/trace.hpp"

namespace seqtrace::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SEQTRACE_DATA_DIR) / name;
}

inline SurfaceNode node(Profile profile, double thickness, glass::Material material = glass::Material::air(),
                        double semi_diameter = kUnbounded, bool stop = false) {
  SurfaceNode s;
  s.profile = profile;
  s.thickness = thickness;
  s.material_after = std::move(material);
  s.semi_diameter = semi_diameter;
  s.is_stop = stop;
  return s;
}

inline SurfaceNode image_plane() { return node(Profile::plano(), 0.0); }

inline glass::Material constant_glass(double n) { return glass::Material::constant("N" + std::to_string(n), n); }

inline LensSystem make_system(std::vector<SurfaceNode> surfaces, double epd = 10.0,
                              std::vector<double> fields = {0.0},
                              std::vector<Wavelength> wavelengths = {{0.58756, 1.0}}, std::size_t primary = 0) {
  bool has_stop = false;
  for (const auto& s : surfaces) has_stop = has_stop || s.is_stop;
  if (!has_stop) surfaces.front().is_stop = true;
  return LensSystem(std::move(surfaces), epd, std::move(fields), std::move(wavelengths), primary);
}

// Plano-convex singlet: R1 front, plano back, image plane `back` after it.
inline LensSystem plano_convex(double r1, double center, double n, double back, double epd = 10.0,
                               std::vector<double> fields = {0.0}) {
  return make_system({node(Profile::sphere(r1), center, constant_glass(n)), node(Profile::plano(), back),
                      image_plane()},
                     epd, std::move(fields));
}

// Doubles in [lo, hi) from (x >> 11)·2⁻⁵³, so streams are portable across libstdc++ versions.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  std::uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Six refracting surfaces alternating glass and air, moderate curvatures, no apertures.
inline LensSystem random_six_surface(std::uint64_t seed) {
  Uniform u(seed);
  std::vector<SurfaceNode> s;
  for (int i = 0; i < 6; ++i) {
    const double r = (u() < 0.5 ? -1.0 : 1.0) * u(25.0, 120.0);
    const bool glass_after = i % 2 == 0;
    s.push_back(node(u() < 0.15 ? Profile::plano() : (u() < 0.3 ? Profile::conic(r, u(-1.5, 0.5)) : Profile::sphere(r)),
                     glass_after ? u(3.0, 8.0) : u(1.0, 6.0),
                     glass_after ? constant_glass(u(1.45, 1.95)) : glass::Material::air()));
  }
  s.front().is_stop = true;
  s.push_back(image_plane());
  s[5].thickness = 20.0;
  return LensSystem(std::move(s), 10.0, {0.0}, {{0.58756, 1.0}}, 0);
}

struct InvariantResiduals {
  double snell_vector = 0.0;  // max |n₁|d×N| − n₂|d'×N||
  double snell_angle = 0.0;   // max |n₁ sin θ₁ − n₂ sin θ₂| from the recorded angles
  double planarity = 0.0;     // max |d·(d'×N)|
  double unit = 0.0;          // max ||d'| − 1|
  double max_abs_x = 0.0;
};

inline InvariantResiduals residuals(const Ray& ray, const TraceResult& r) {
  InvariantResiduals out;
  Vec3 d = ray.direction();
  for (const auto& h : r.records) {
    const double a = h.n_before * norm(cross(d, h.normal));
    const double b = h.n_after * norm(cross(h.direction, h.normal));
    out.snell_vector = std::max(out.snell_vector, std::abs(a - b));
    out.snell_angle = std::max(out.snell_angle, std::abs(h.n_before * std::sin(h.incidence_angle) -
                                                         h.n_after * std::sin(h.refraction_angle)));
    out.planarity = std::max(out.planarity, std::abs(dot(d, cross(h.direction, h.normal))));
    out.unit = std::max(out.unit, std::abs(norm(h.direction) - 1.0));
    out.max_abs_x = std::max(out.max_abs_x, std::abs(h.point.x));
    d = h.direction;
  }
  return out;
}

// Mirror image of `system` (z → −z) traversed backwards. The original object
// space, `object_gap` before surface 0, becomes the new image space.
inline LensSystem reversed(const LensSystem& system, double object_gap) {
  const std::size_t last = system.last_optical_index();
  std::vector<SurfaceNode> s;
  // original image plane becomes the entrance (stop) surface
  s.push_back(node(Profile::plano(), system.surface(last).thickness, glass::Material::air(), kUnbounded, true));
  for (std::size_t k = last + 1; k-- > 0;) {
    const auto& o = system.surface(k);
    Profile p = o.profile.kind() == ProfileKind::plano ? Profile::plano()
                : o.profile.kind() == ProfileKind::sphere
                    ? Profile::sphere(-o.profile.radius())
                    : Profile::conic(-o.profile.radius(), o.profile.conic_constant());
    const double gap = k == 0 ? object_gap : system.surface(k - 1).thickness;
    auto material = k == 0 ? glass::Material::air() : system.surface(k - 1).material_after;
    s.push_back(node(p, gap, std::move(material)));
  }
  s.push_back(image_plane());
  return LensSystem(std::move(s), system.entrance_pupil_diameter(), {0.0}, system.wavelengths(),
                    system.primary_index());
}

}  // namespace seqtrace::test
