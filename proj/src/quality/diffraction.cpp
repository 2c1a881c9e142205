#include "seqtrace/diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "seqtrace/detail/fft.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/paraxial.hpp"

namespace seqtrace {

namespace {

constexpr double kMaxOpdStep = 0.5;

void check_sampling(const PupilGrid& p) {
  const int n = p.n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n + i;
      if (p.amplitude[k] == 0.0) continue;
      if (i + 1 < n && p.amplitude[k + 1] != 0.0 &&
          std::abs(p.opd_waves[k + 1] - p.opd_waves[k]) > kMaxOpdStep)
        throw Error(ErrorKind::grid_too_coarse, "OPD step between pupil samples exceeds 0.5 waves");
      if (j + 1 < n && p.amplitude[k + n] != 0.0 &&
          std::abs(p.opd_waves[k + n] - p.opd_waves[k]) > kMaxOpdStep)
        throw Error(ErrorKind::grid_too_coarse, "OPD step between pupil samples exceeds 0.5 waves");
    }
  }
}

}  // namespace

PupilGrid ideal_pupil(int n) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "pupil grid needs n >= 2");
  PupilGrid p{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0),
              std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int j = 0; j < n; ++j) {
    const double y = (j + 0.5) / n * 2.0 - 1.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n * 2.0 - 1.0;
      if (x * x + y * y <= 1.0) p.amplitude[static_cast<std::size_t>(j) * n + i] = 1.0;
    }
  }
  return p;
}

PupilGrid pupil_from_opd(const OpdMap& map) {
  PupilGrid p{map.n, std::vector<double>(map.mask.size()), map.opd_waves};
  for (std::size_t k = 0; k < map.mask.size(); ++k) p.amplitude[k] = map.mask[k] ? 1.0 : 0.0;
  check_sampling(p);
  return p;
}

Psf psf_from_pupil(const PupilGrid& pupil, int pad, double wavelength_um, double fno) {
  if (pad < 2) throw Error(ErrorKind::invalid_argument, "pad factor must be >= 2");
  check_sampling(pupil);
  const int n = pupil.n;
  const int big = n * pad;
  std::vector<std::complex<double>> field(static_cast<std::size_t>(big) * big);
  double ideal_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n + i;
      const double a = pupil.amplitude[k];
      if (a == 0.0) continue;
      ideal_sum += a;
      field[static_cast<std::size_t>(j) * big + i] =
          std::polar(a, 2.0 * std::numbers::pi * pupil.opd_waves[k]);
    }
  }
  if (ideal_sum == 0.0) throw Error(ErrorKind::no_unvignetted_rays, "pupil is fully obscured");
  detail::fft2d(field, big, big);

  Psf psf;
  psf.size = big;
  psf.pixel_um = wavelength_um * fno / pad;
  psf.wavelength_um = wavelength_um;
  psf.fno = fno;
  psf.pupil_n = n;
  psf.intensity.assign(field.size(), 0.0);
  const int half = big / 2;
  for (int j = 0; j < big; ++j) {
    const int sj = (j + half) % big;
    for (int i = 0; i < big; ++i) {
      const int si = (i + half) % big;
      psf.intensity[static_cast<std::size_t>(sj) * big + si] =
          std::norm(field[static_cast<std::size_t>(j) * big + i]);
    }
  }
  psf.peak = *std::max_element(psf.intensity.begin(), psf.intensity.end());
  psf.ideal_peak = ideal_sum * ideal_sum;
  psf.strehl = psf.peak / psf.ideal_peak;
  for (double& v : psf.intensity) v /= psf.peak;
  return psf;
}

Psf psf_and_strehl(const LensSystem& system, double field_deg, int grid_n, int pad) {
  const double wl = system.primary_wavelength();
  const double fno = system_summary(system, wl).fno;
  return psf_from_pupil(pupil_from_opd(opd_map(system, field_deg, grid_n, wl)), pad, wl, fno);
}

MtfCurve mtf_from_psf(const Psf& psf) {
  const int big = psf.size;
  std::vector<std::complex<double>> data(psf.intensity.begin(), psf.intensity.end());
  detail::fft2d(data, big, big);
  const double dc = std::abs(data[0]);
  MtfCurve curve;
  curve.cutoff = 1.0 / (psf.wavelength_um * 1e-3 * psf.fno);
  const int n = psf.pupil_n;
  for (int k = 0; k <= n; ++k) {
    curve.frequency.push_back(curve.cutoff * k / n);
    if (k == n) {
      curve.tangential.push_back(0.0);
      curve.sagittal.push_back(0.0);
      continue;
    }
    curve.sagittal.push_back(k == 0 ? 1.0 : std::abs(data[static_cast<std::size_t>(k)]) / dc);
    curve.tangential.push_back(k == 0 ? 1.0 : std::abs(data[static_cast<std::size_t>(k) * big]) / dc);
  }
  return curve;
}

MtfCurve mtf(const LensSystem& system, double field_deg, int grid_n, int pad) {
  return mtf(system, field_deg, grid_n, pad, system.primary_wavelength());
}

MtfCurve mtf(const LensSystem& system, double field_deg, int grid_n, int pad, double wavelength_um) {
  const double fno = system_summary(system, system.primary_wavelength()).fno;
  const Psf psf = psf_from_pupil(pupil_from_opd(opd_map(system, field_deg, grid_n, wavelength_um)),
                                 pad, wavelength_um, fno);
  return mtf_from_psf(psf);
}

MtfCurve polychromatic_mtf(const LensSystem& system, double field_deg, int grid_n, int pad) {
  MtfCurve out = mtf(system, field_deg, grid_n, pad);
  double total = 0.0;
  std::vector<double> tan(out.frequency.size(), 0.0), sag(out.frequency.size(), 0.0);
  for (const Wavelength& wl : system.wavelengths()) {
    if (wl.weight == 0.0) continue;
    const MtfCurve c = mtf(system, field_deg, grid_n, pad, wl.um);
    for (std::size_t k = 0; k < out.frequency.size(); ++k) {
      tan[k] += wl.weight * mtf_at(c.frequency, c.tangential, out.frequency[k]);
      sag[k] += wl.weight * mtf_at(c.frequency, c.sagittal, out.frequency[k]);
    }
    total += wl.weight;
  }
  if (total == 0.0) return out;
  for (std::size_t k = 0; k < out.frequency.size(); ++k) {
    out.tangential[k] = tan[k] / total;
    out.sagittal[k] = sag[k] / total;
  }
  out.tangential[0] = out.sagittal[0] = 1.0;
  return out;
}

double diffraction_limited_mtf(double nu) {
  if (nu <= 0.0) return 1.0;
  if (nu >= 1.0) return 0.0;
  return 2.0 / std::numbers::pi * (std::acos(nu) - nu * std::sqrt(1.0 - nu * nu));
}

double mtf_at(const std::vector<double>& frequency, const std::vector<double>& modulation, double f) {
  if (frequency.empty() || f > frequency.back()) return 0.0;
  if (f <= frequency.front()) return modulation.front();
  const auto it = std::upper_bound(frequency.begin(), frequency.end(), f);
  const std::size_t k = static_cast<std::size_t>(it - frequency.begin());
  if (k >= frequency.size()) return modulation.back();
  const double t = (f - frequency[k - 1]) / (frequency[k] - frequency[k - 1]);
  return modulation[k - 1] + t * (modulation[k] - modulation[k - 1]);
}

}  // namespace seqtrace
