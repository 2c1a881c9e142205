#pragma once

#include <vector>

#include "seqtrace/system.hpp"

namespace seqtrace {

// One rung of a y–nu ladder: height at the surface and slopes either side of it.
struct ParaxialStep {
  double y;
  double u_before;
  double u_after;
  double n_before;
  double n_after;
  double curvature;
  double thickness;
};

using ParaxialLadder = std::vector<ParaxialStep>;

struct ParaxialRayStart {
  double y;  // height at the first surface, mm
  double u;  // slope in object space
};

// Refraction n'u' = nu − y·c·(n' − n); transfer y' = y + u'·t. One rung per surface.
ParaxialLadder paraxial_trace(const LensSystem& system, double y0, double u0, double wavelength_um);

// Marginal ray of the infinite-conjugate system: y = EPD/2, u = 0.
ParaxialRayStart marginal_ray_start(const LensSystem& system);

// Chief ray at the given field angle, solved to cross the stop center.
ParaxialRayStart chief_ray_start(const LensSystem& system, double field_deg, double wavelength_um);

struct EntrancePupil {
  double position;  // mm from the first surface vertex (negative: in front)
  double diameter;  // mm
};

struct ParaxialSummary {
  double effl;
  double bfl;   // last optical surface to paraxial focus
  double totr;  // first surface to image plane
  double fno;   // effl / EPD
  EntrancePupil entrance_pupil;
  double exit_pupil_z;                // global z of the paraxial exit pupil (inf if telecentric)
  double lagrange_invariant;          // at full field
  std::vector<double> image_heights;  // effl·tan θ per system field
  double wavelength;
};

// Throws AfocalSystem when the marginal ray leaves the last surface with |u'| < 1e-12.
ParaxialSummary system_summary(const LensSystem& system);
ParaxialSummary system_summary(const LensSystem& system, double wavelength_um);

// Sets the last gap so the marginal ray crosses the axis on the image plane.
LensSystem solve_image_plane(const LensSystem& system);

struct ConjugateSolution {
  LensSystem system;
  double image_distance;  // last surface to image, mm
  double magnification;
};

// Finite-conjugate variant: object `object_distance` mm in front of the first surface.
ConjugateSolution solve_image_plane(const LensSystem& system, double object_distance);

}  // namespace seqtrace
