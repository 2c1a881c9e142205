#include "seqtrace/system.hpp"

#include <algorithm>
#include <cmath>

#include "seqtrace/error.hpp"

namespace seqtrace {

LensSystem::LensSystem(std::vector<SurfaceNode> surfaces, double entrance_pupil_diameter,
                       std::vector<double> fields_deg, std::vector<Wavelength> wavelengths,
                       std::size_t primary_wavelength_index)
    : surfaces_(std::move(surfaces)),
      epd_(entrance_pupil_diameter),
      fields_(std::move(fields_deg)),
      wavelengths_(std::move(wavelengths)),
      primary_(primary_wavelength_index) {
  validate_and_cache();
}

void LensSystem::validate_and_cache() {
  if (surfaces_.size() < 2)
    throw Error(ErrorKind::invalid_argument, "a system needs an optical surface and an image plane");
  std::size_t stops = 0;
  for (std::size_t i = 0; i < surfaces_.size(); ++i) {
    const auto& s = surfaces_[i];
    if (s.is_stop) {
      ++stops;
      stop_index_ = i;
    }
    if (!std::isfinite(s.thickness))
      throw Error(ErrorKind::invalid_argument, "surface " + std::to_string(i) + ": thickness must be finite");
    if (!(s.semi_diameter > 0.0))
      throw Error(ErrorKind::invalid_argument, "surface " + std::to_string(i) + ": semi-diameter must be > 0");
  }
  if (stops == 0) throw Error(ErrorKind::no_stop_surface, "no surface is marked as the stop");
  if (stops > 1) throw Error(ErrorKind::multiple_stops, "more than one surface is marked as the stop");
  if (stop_index_ == image_index())
    throw Error(ErrorKind::invalid_argument, "the image plane cannot be the stop");
  if (!(epd_ > 0.0) || !std::isfinite(epd_))
    throw Error(ErrorKind::invalid_argument, "entrance-pupil diameter must be > 0");
  if (fields_.empty()) throw Error(ErrorKind::invalid_argument, "at least one field is required");
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (!(fields_[i] >= 0.0) || fields_[i] >= 90.0)
      throw Error(ErrorKind::invalid_argument, "field angles must lie in [0, 90) degrees");
    for (std::size_t j = 0; j < i; ++j)
      if (fields_[j] == fields_[i]) throw Error(ErrorKind::invalid_argument, "duplicate field angle");
  }
  if (wavelengths_.empty()) throw Error(ErrorKind::invalid_argument, "at least one wavelength is required");
  for (const auto& w : wavelengths_)
    if (!(w.um > 0.0) || !(w.weight >= 0.0))
      throw Error(ErrorKind::invalid_argument, "wavelengths must be > 0 with weights >= 0");
  if (primary_ >= wavelengths_.size())
    throw Error(ErrorKind::invalid_argument, "primary wavelength index out of range");

  vertex_z_.assign(surfaces_.size(), 0.0);
  for (std::size_t i = 1; i < surfaces_.size(); ++i)
    vertex_z_[i] = vertex_z_[i - 1] + surfaces_[i - 1].thickness;
}

double LensSystem::max_field() const { return *std::max_element(fields_.begin(), fields_.end()); }

double LensSystem::total_track() const {
  double sum = 0.0;
  for (const auto& s : surfaces_) sum += s.thickness;
  return sum;
}

std::vector<double> LensSystem::media(double wavelength_um) const {
  std::vector<double> n(surfaces_.size());
  for (std::size_t i = 0; i < surfaces_.size(); ++i)
    n[i] = surfaces_[i].material_after.refractive_index(wavelength_um);
  return n;
}

double LensSystem::index_after(std::size_t i, double wavelength_um) const {
  return surfaces_.at(i).material_after.refractive_index(wavelength_um);
}

double LensSystem::index_before(std::size_t i, double wavelength_um) const {
  return i == 0 ? 1.0 : index_after(i - 1, wavelength_um);
}

LensSystem LensSystem::with_thickness(std::size_t i, double thickness) const {
  LensSystem copy = *this;
  copy.surfaces_.at(i).thickness = thickness;
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_profile(std::size_t i, const Profile& profile) const {
  LensSystem copy = *this;
  copy.surfaces_.at(i).profile = profile;
  return copy;
}

LensSystem LensSystem::with_material(std::size_t i, const glass::Material& material) const {
  LensSystem copy = *this;
  copy.surfaces_.at(i).material_after = material;
  return copy;
}

LensSystem LensSystem::with_semi_diameter(std::size_t i, double semi_diameter) const {
  LensSystem copy = *this;
  copy.surfaces_.at(i).semi_diameter = semi_diameter;
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_entrance_pupil_diameter(double epd) const {
  LensSystem copy = *this;
  copy.epd_ = epd;
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_fields(std::vector<double> fields_deg) const {
  LensSystem copy = *this;
  copy.fields_ = std::move(fields_deg);
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_wavelengths(std::vector<Wavelength> wavelengths, std::size_t primary) const {
  LensSystem copy = *this;
  copy.wavelengths_ = std::move(wavelengths);
  copy.primary_ = primary;
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_stop(std::size_t i) const {
  LensSystem copy = *this;
  for (auto& s : copy.surfaces_) s.is_stop = false;
  copy.surfaces_.at(i).is_stop = true;
  copy.validate_and_cache();
  return copy;
}

LensSystem LensSystem::with_dummy_surface(std::size_t i, double gap_before) const {
  if (i > image_index()) throw Error(ErrorKind::invalid_argument, "dummy surface index out of range");
  LensSystem copy = *this;
  SurfaceNode dummy;
  if (i == 0) {
    dummy.thickness = gap_before;
  } else {
    auto& prev = copy.surfaces_[i - 1];
    dummy.material_after = prev.material_after;
    dummy.thickness = prev.thickness - gap_before;
    prev.thickness = gap_before;
  }
  copy.surfaces_.insert(copy.surfaces_.begin() + static_cast<std::ptrdiff_t>(i), dummy);
  copy.validate_and_cache();
  return copy;
}

}  // namespace seqtrace
