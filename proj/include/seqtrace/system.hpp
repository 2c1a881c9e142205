#pragma once

#include <cstddef>
#include <vector>

#include "seqtrace/surface.hpp"

namespace seqtrace {

struct Wavelength {
  double um;
  double weight = 1.0;

  bool operator==(const Wavelength&) const = default;
};

// Ordered surface list from the first optical surface to the image plane, with
// the object at infinity and fields given as angles in degrees.
//
// Immutable once constructed: the with_* helpers return validated copies.
class LensSystem {
 public:
  // Throws NoStopSurface / MultipleStops / InvalidArgument on bad input.
  LensSystem(std::vector<SurfaceNode> surfaces, double entrance_pupil_diameter,
             std::vector<double> fields_deg, std::vector<Wavelength> wavelengths,
             std::size_t primary_wavelength_index);

  const std::vector<SurfaceNode>& surfaces() const { return surfaces_; }
  const SurfaceNode& surface(std::size_t i) const { return surfaces_.at(i); }
  std::size_t size() const { return surfaces_.size(); }
  std::size_t stop_index() const { return stop_index_; }
  std::size_t image_index() const { return surfaces_.size() - 1; }
  // Last surface before the image plane.
  std::size_t last_optical_index() const { return surfaces_.size() - 2; }

  double entrance_pupil_diameter() const { return epd_; }
  const std::vector<double>& fields() const { return fields_; }
  double max_field() const;
  const std::vector<Wavelength>& wavelengths() const { return wavelengths_; }
  std::size_t primary_index() const { return primary_; }
  double primary_wavelength() const { return wavelengths_[primary_].um; }

  // Global z of surface i's vertex; surface 0 sits at z = 0.
  double vertex_z(std::size_t i) const { return vertex_z_.at(i); }
  // Sum of every thickness from the first surface through the image plane.
  double total_track() const;

  // Refractive index of the medium after each surface at the given wavelength.
  std::vector<double> media(double wavelength_um) const;
  double index_after(std::size_t i, double wavelength_um) const;
  double index_before(std::size_t i, double wavelength_um) const;

  LensSystem with_thickness(std::size_t i, double thickness) const;
  LensSystem with_profile(std::size_t i, const Profile& profile) const;
  LensSystem with_material(std::size_t i, const glass::Material& material) const;
  LensSystem with_semi_diameter(std::size_t i, double semi_diameter) const;
  LensSystem with_entrance_pupil_diameter(double epd) const;
  LensSystem with_fields(std::vector<double> fields_deg) const;
  LensSystem with_wavelengths(std::vector<Wavelength> wavelengths, std::size_t primary) const;
  LensSystem with_stop(std::size_t i) const;
  // Inserts a zero-power plano surface in the medium before surface i.
  LensSystem with_dummy_surface(std::size_t i, double gap_before) const;

  bool operator==(const LensSystem&) const = default;

 private:
  void validate_and_cache();

  std::vector<SurfaceNode> surfaces_;
  double epd_;
  std::vector<double> fields_;
  std::vector<Wavelength> wavelengths_;
  std::size_t primary_;
  std::size_t stop_index_ = 0;
  std::vector<double> vertex_z_;
};

}  // namespace seqtrace
