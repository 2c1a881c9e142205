#pragma once

#include <vector>

#include "seqtrace/system.hpp"

namespace seqtrace {

struct FieldPoint {
  double field_deg;
  double tangential_shift_mm;  // along z from the image plane; + is behind it
  double sagittal_shift_mm;
  double real_height_mm;       // real chief-ray height on the image plane
  double paraxial_height_mm;   // paraxial chief-ray height on the image plane
  double distortion_percent;   // 100·(real − paraxial)/paraxial, 0 on axis
};

struct FieldScan {
  double wavelength_um;
  std::vector<FieldPoint> points;
};

// Coddington close-ray focus along the aimed real chief ray plus real-vs-paraxial
// distortion, at the primary wavelength.
FieldPoint field_point(const LensSystem& system, double field_deg);

// `samples` fields evenly spaced from 0 to the maximum system field.
FieldScan field_curves_distortion(const LensSystem& system, int samples = 21);

}  // namespace seqtrace
