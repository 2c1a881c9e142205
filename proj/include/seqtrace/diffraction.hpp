#pragma once

#include <vector>

#include "seqtrace/system.hpp"
#include "seqtrace/wavefront.hpp"

namespace seqtrace {

// Sampled pupil function: amplitude (0/1 aperture mask) and wavefront error in
// waves over an n×n grid of cell centers, row-major.
struct PupilGrid {
  int n = 0;
  std::vector<double> amplitude;
  std::vector<double> opd_waves;
};

PupilGrid ideal_pupil(int n);
// Throws GridTooCoarse when adjacent unmasked cells differ by more than 0.5 waves.
PupilGrid pupil_from_opd(const OpdMap& map);

struct Psf {
  int size = 0;             // N = n·pad samples per side, DC at (N/2, N/2)
  double pixel_um = 0.0;    // λ·fno/pad
  double wavelength_um = 0.0;
  double fno = 0.0;
  int pupil_n = 0;
  std::vector<double> intensity;  // normalized to its own peak (relative irradiance)
  double peak = 0.0;        // raw peak before normalization
  double ideal_peak = 0.0;  // (Σ amplitude)², the unaberrated peak
  double strehl = 0.0;      // peak / ideal_peak
};

// |DFT(zero-padded pupil function)|², pad ≥ 2.
Psf psf_from_pupil(const PupilGrid& pupil, int pad, double wavelength_um, double fno);

// PSF of one field at the primary wavelength.
Psf psf_and_strehl(const LensSystem& system, double field_deg, int grid_n = 64, int pad = 4);

struct MtfCurve {
  std::vector<double> frequency;  // cycles/mm
  std::vector<double> tangential;
  std::vector<double> sagittal;
  double cutoff = 0.0;            // 1/(λ·fno), cycles/mm
};

// |DFT(PSF)| normalized at zero frequency, sampled at k/(n·λ·fno) for k = 0..n.
MtfCurve mtf_from_psf(const Psf& psf);

MtfCurve mtf(const LensSystem& system, double field_deg, int grid_n = 64, int pad = 4);
MtfCurve mtf(const LensSystem& system, double field_deg, int grid_n, int pad, double wavelength_um);

// Weight-averaged monochromatic MTFs resampled onto the primary-wavelength axis.
MtfCurve polychromatic_mtf(const LensSystem& system, double field_deg, int grid_n = 64, int pad = 4);

// (2/π)(arccos ν − ν√(1 − ν²)) for normalized frequency ν ∈ [0, 1]; 0 beyond.
double diffraction_limited_mtf(double nu);

// Linear interpolation of a modulation curve at frequency f (0 beyond the last sample).
double mtf_at(const std::vector<double>& frequency, const std::vector<double>& modulation, double f);

}  // namespace seqtrace
