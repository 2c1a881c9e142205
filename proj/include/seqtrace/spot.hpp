#pragma once

#include <cstddef>
#include <vector>

#include "seqtrace/pupil.hpp"
#include "seqtrace/system.hpp"

namespace seqtrace {

struct SpotPoint {
  double x;  // mm, image plane
  double y;
};

struct SpotEntry {
  double field_deg;
  double wavelength_um;
  std::vector<SpotPoint> hits;
  SpotPoint centroid;
  SpotPoint chief;           // chief-ray hit (IMA height is chief.y)
  double rms_radius_um;      // about the centroid
  double geo_radius_um;      // max distance from the chief-ray hit
  std::size_t launched;
  std::size_t lost;          // vignetted, missed or TIR
  std::size_t vignetted;     // of `lost`, stopped by a clear aperture
};

struct SpotReport {
  std::vector<SpotEntry> entries;          // field-major, then system wavelength order
  std::vector<double> polychromatic_rms_um;  // per field, weight-averaged over wavelengths
  double airy_radius_um;                   // 1.22·λ·fno at the primary wavelength
};

// Traces every field × wavelength × pupil sample on the image plane. The chief ray
// of each field is aimed at the primary wavelength and that launch geometry is
// shared by all wavelengths. Throws NoUnvignettedRays when a field loses all rays.
SpotReport spot_diagram(const LensSystem& system, PupilPattern pattern = PupilPattern::hexapolar,
                        int n = 10);

}  // namespace seqtrace
