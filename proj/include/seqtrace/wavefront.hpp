#pragma once

#include <vector>

#include "seqtrace/system.hpp"

namespace seqtrace {

struct OpdSample {
  double p;          // normalized pupil coordinate along the fan arm
  double opd_waves;  // NaN when the ray is lost
  bool valid;
};

struct OpdFanEntry {
  double field_deg;
  std::vector<OpdSample> tangential;  // px = 0, varying py
  std::vector<OpdSample> sagittal;    // py = 0, varying px
};

struct OpdFan {
  double wavelength_um;
  std::vector<OpdFanEntry> fields;
};

// OPD = OPL(chief) − OPL(ray), both measured to a reference sphere centered on the
// chief-ray image point with radius equal to its distance from the paraxial exit
// pupil. Odd sample counts put p = 0 exactly on the chief ray.
OpdFan opd_fan(const LensSystem& system, int samples_per_arm = 21);
OpdFan opd_fan(const LensSystem& system, int samples_per_arm, double wavelength_um);

// OPD over an n×n grid of pupil cell centers, row-major with y varying slowest.
// Cells outside the unit disk or whose ray is lost are masked out.
struct OpdMap {
  int n = 0;
  double field_deg = 0.0;
  double wavelength_um = 0.0;
  std::vector<double> opd_waves;  // 0 where masked
  std::vector<unsigned char> mask;
  std::size_t vignetted_cells = 0;  // in-disk cells stopped by a clear aperture
  std::size_t failed_cells = 0;     // in-disk cells whose ray missed a surface or hit TIR
};

OpdMap opd_map(const LensSystem& system, double field_deg, int n, double wavelength_um);

// RMS over the unmasked cells after removing the mean (piston), in waves.
double opd_rms(const OpdMap& map);

}  // namespace seqtrace
