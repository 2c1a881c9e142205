#pragma once

#include <limits>

#include "seqtrace/glass.hpp"
#include "seqtrace/vec3.hpp"

namespace seqtrace {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class ProfileKind { plano, sphere, conic };

// Rotationally symmetric surface profile. Radius is positive when the center of
// curvature lies on the +z side of the vertex.
class Profile {
 public:
  static Profile plano() { return Profile(ProfileKind::plano, kUnbounded, 0.0); }
  static Profile sphere(double radius);
  static Profile conic(double radius, double conic_constant);
  // c == 0 maps to plano; a non-zero conic constant keeps the conic kind.
  static Profile from_curvature(double curvature, double conic_constant = 0.0);

  ProfileKind kind() const { return kind_; }
  double curvature() const { return curvature_; }
  double radius() const { return radius_; }
  double conic_constant() const { return conic_; }

  // Sag at squared radial height r²; NaN where the profile does not exist.
  double sag(double r2) const;

  // Meridional and sagittal principal curvatures at radial height r.
  double meridional_curvature(double r) const;
  double sagittal_curvature(double r) const;

  bool operator==(const Profile&) const = default;

 private:
  // The radius is the stored quantity so that written prescriptions round-trip
  // exactly; the curvature is always 1/radius.
  Profile(ProfileKind kind, double radius, double conic)
      : kind_(kind), radius_(radius), curvature_(kind == ProfileKind::plano ? 0.0 : 1.0 / radius),
        conic_(conic) {}

  ProfileKind kind_;
  double radius_;
  double curvature_;
  double conic_;
};

struct SurfaceNode {
  Profile profile = Profile::plano();
  double thickness = 0.0;  // axial gap to the next surface, mm
  glass::Material material_after = glass::Material::air();
  double semi_diameter = kUnbounded;  // clear-aperture half height, mm
  bool is_stop = false;

  bool operator==(const SurfaceNode&) const = default;
};

}  // namespace seqtrace
