#pragma once

#include "seqtrace/system.hpp"
#include "seqtrace/trace.hpp"
#include "seqtrace/vec3.hpp"

namespace seqtrace {

// Object-space geometry of a collimated beam entering the system. Pupil
// coordinates are mapped onto the entrance-pupil plane around `pupil_center`;
// every launch point lies on one plane wavefront, so traced OPLs are directly
// comparable.
struct LaunchFrame {
  Vec3 direction;      // unit, object space
  Vec3 pupil_center;   // where the chief ray crosses the entrance-pupil plane
  double pupil_radius; // EPD / 2
  double wavefront_offset;  // distance from the pupil center back to the launch wavefront

  Vec3 pupil_point(double px, double py) const;
  Vec3 origin(double px, double py) const;
  Ray ray(double px, double py, double wavelength_um) const;
};

// Unit object-space direction for a field angle in the y–z plane.
Vec3 field_direction(double field_deg);

// Paraxial aiming: the chief ray targets the paraxial entrance-pupil center.
LaunchFrame paraxial_launch(const LensSystem& system, const Vec3& direction);

// Real-ray aiming: damped Newton on the entrance-pupil intercept until the chief
// ray crosses the stop center within 1e-9 mm (apertures ignored while aiming).
// Throws AimingFailure.
LaunchFrame aim_chief_ray(const LensSystem& system, double field_deg, double wavelength_um);

}  // namespace seqtrace
