#include "seqtrace/paraxial.hpp"

#include <cmath>
#include <numbers>

#include "seqtrace/error.hpp"

namespace seqtrace {

namespace {

constexpr double kAfocalSlope = 1e-12;

double stop_height(const LensSystem& system, double y0, double u0, double wavelength_um) {
  return paraxial_trace(system, y0, u0, wavelength_um)[system.stop_index()].y;
}

double tan_deg(double deg) { return std::tan(deg * std::numbers::pi / 180.0); }

}  // namespace

ParaxialLadder paraxial_trace(const LensSystem& system, double y0, double u0, double wavelength_um) {
  const auto media = system.media(wavelength_um);
  ParaxialLadder ladder;
  ladder.reserve(system.size());
  double y = y0;
  double u = u0;
  double n = 1.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto& s = system.surface(i);
    const double c = s.profile.curvature();
    const double n_after = media[i];
    const double u_after = (n * u - y * c * (n_after - n)) / n_after;
    ladder.push_back({y, u, u_after, n, n_after, c, s.thickness});
    y += u_after * s.thickness;
    u = u_after;
    n = n_after;
  }
  return ladder;
}

ParaxialRayStart marginal_ray_start(const LensSystem& system) {
  return {system.entrance_pupil_diameter() / 2.0, 0.0};
}

ParaxialRayStart chief_ray_start(const LensSystem& system, double field_deg, double wavelength_um) {
  const double h_angle = stop_height(system, 0.0, 1.0, wavelength_um);
  const double h_height = stop_height(system, 1.0, 0.0, wavelength_um);
  if (std::abs(h_height) < 1e-15)
    throw Error(ErrorKind::invalid_argument, "stop is conjugate to the object; chief ray undefined");
  const double u = tan_deg(field_deg);
  return {-u * h_angle / h_height, u};
}

ParaxialSummary system_summary(const LensSystem& system) {
  return system_summary(system, system.primary_wavelength());
}

ParaxialSummary system_summary(const LensSystem& system, double wavelength_um) {
  const auto m = marginal_ray_start(system);
  const auto marginal = paraxial_trace(system, m.y, m.u, wavelength_um);
  const std::size_t k = system.last_optical_index();
  const double u_out = marginal[k].u_after;
  if (std::abs(u_out) < kAfocalSlope) throw Error(ErrorKind::afocal_system, "system is afocal");

  ParaxialSummary s;
  s.wavelength = wavelength_um;
  s.effl = -m.y / u_out;
  s.bfl = -marginal[k].y / u_out;
  s.totr = system.total_track();
  s.fno = s.effl / system.entrance_pupil_diameter();

  const double h_angle = stop_height(system, 0.0, 1.0, wavelength_um);
  const double h_height = stop_height(system, 1.0, 0.0, wavelength_um);
  s.entrance_pupil = {h_angle / h_height, system.entrance_pupil_diameter()};

  const auto c = chief_ray_start(system, 1.0, wavelength_um);
  const auto chief = paraxial_trace(system, c.y, c.u, wavelength_um);
  const double ubar_out = chief[k].u_after;
  s.exit_pupil_z = std::abs(ubar_out) < kAfocalSlope
                       ? HUGE_VAL
                       : system.vertex_z(k) - chief[k].y / ubar_out;

  const double u_full = tan_deg(system.max_field());
  // n(u·ȳ − ū·y) evaluated in object space, where n = 1 and the marginal slope is 0.
  s.lagrange_invariant = -u_full * m.y;
  for (double f : system.fields()) s.image_heights.push_back(s.effl * tan_deg(f));
  return s;
}

LensSystem solve_image_plane(const LensSystem& system) {
  const auto m = marginal_ray_start(system);
  const auto ladder = paraxial_trace(system, m.y, m.u, system.primary_wavelength());
  const std::size_t k = system.last_optical_index();
  const double u_out = ladder[k].u_after;
  if (std::abs(u_out) < kAfocalSlope) throw Error(ErrorKind::afocal_system, "system is afocal");
  const double gap = -ladder[k].y / u_out;
  if (gap == system.surface(k).thickness) return system;
  return system.with_thickness(k, gap);
}

ConjugateSolution solve_image_plane(const LensSystem& system, double object_distance) {
  if (!(object_distance > 0.0) || !std::isfinite(object_distance)) {
    auto solved = solve_image_plane(system);
    const std::size_t k = solved.last_optical_index();
    return {solved, solved.surface(k).thickness, 0.0};
  }
  const double y0 = system.entrance_pupil_diameter() / 2.0;
  const double u0 = y0 / object_distance;  // from the axial object point up to height y0
  const auto ladder = paraxial_trace(system, y0, u0, system.primary_wavelength());
  const std::size_t k = system.last_optical_index();
  const double u_out = ladder[k].u_after;
  if (std::abs(u_out) < kAfocalSlope)
    throw Error(ErrorKind::afocal_system, "image at infinity for this object distance");
  const double gap = -ladder[k].y / u_out;
  // m = (n·u)_object / (n'·u')_image with air in object space.
  const double n_image = ladder[k].n_after;
  const double magnification = u0 / (n_image * u_out);
  return {system.with_thickness(k, gap), gap, magnification};
}

}  // namespace seqtrace
