#include "seqtrace/wavefront.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "seqtrace/aim.hpp"
#include "seqtrace/detail/beam.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/kernels.hpp"
#include "seqtrace/paraxial.hpp"

namespace seqtrace {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// OPD in waves for each pupil sample; NaN for lost rays.
std::vector<double> opd_values(const LensSystem& system, double field_deg, double wavelength_um,
                               const std::vector<PupilSample>& samples,
                               std::vector<std::int32_t>* status = nullptr) {
  const LaunchFrame frame = aim_chief_ray(system, field_deg, system.primary_wavelength());
  const double exit_pupil_z = system_summary(system, wavelength_um).exit_pupil_z;
  const auto constants = kernels::surface_constants(system, wavelength_um);
  const double n_image = constants.back().n_before;

  kernels::RayBatch chief(1);
  chief.set(0, frame.origin(0.0, 0.0), frame.direction);
  kernels::trace_batch(constants, chief);
  if (chief.status[0] != kernels::kCompleted)
    throw Error(ErrorKind::aiming_failure, "chief ray does not reach the image plane");
  const Vec3 center = chief.position(0);
  const Vec3 chief_dir = chief.direction(0);
  const bool planar = !std::isfinite(exit_pupil_z);
  const double radius = planar ? 0.0 : norm(center - Vec3{0.0, 0.0, exit_pupil_z});

  auto reference_opl = [&](const Vec3& q, const Vec3& d, double opl) {
    const Vec3 v = q - center;
    double s;
    if (planar) {
      s = dot(v, chief_dir) / dot(d, chief_dir);
    } else {
      const double b = dot(d, v);
      const double disc = b * b - dot(v, v) + radius * radius;
      if (!(disc >= 0.0)) return kNaN;
      s = b + std::sqrt(disc);
    }
    return opl - n_image * s;
  };

  const double chief_ref = reference_opl(center, chief_dir, chief.opl[0]);
  const double wavelength_mm = wavelength_um * 1e-3;

  kernels::RayBatch batch;
  detail::fill_beam(frame, samples, batch);
  kernels::trace_batch(constants, batch);
  std::vector<double> out(samples.size(), kNaN);
  if (status) *status = batch.status;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (batch.status[i] != kernels::kCompleted) continue;
    if (samples[i].px == 0.0 && samples[i].py == 0.0) {
      out[i] = 0.0;
      continue;
    }
    out[i] = (chief_ref - reference_opl(batch.position(i), batch.direction(i), batch.opl[i])) /
             wavelength_mm;
  }
  return out;
}

std::vector<OpdSample> fan_arm(const std::vector<double>& values, const std::vector<double>& p) {
  std::vector<OpdSample> arm;
  arm.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool ok = std::isfinite(values[i]);
    arm.push_back({p[i], values[i], ok});
  }
  return arm;
}

}  // namespace

OpdFan opd_fan(const LensSystem& system, int samples_per_arm) {
  return opd_fan(system, samples_per_arm, system.primary_wavelength());
}

OpdFan opd_fan(const LensSystem& system, int samples_per_arm, double wavelength_um) {
  if (samples_per_arm < 2) throw Error(ErrorKind::invalid_argument, "fan needs at least 2 samples per arm");
  const int m = samples_per_arm;
  std::vector<double> p(m);
  for (int k = 0; k < m; ++k) p[k] = static_cast<double>(2 * k - (m - 1)) / (m - 1);

  OpdFan fan{wavelength_um, {}};
  for (double field : system.fields()) {
    std::vector<PupilSample> samples;
    for (double v : p) samples.push_back({0.0, v, 1.0});
    for (double v : p) samples.push_back({v, 0.0, 1.0});
    const auto values = opd_values(system, field, wavelength_um, samples);
    const std::vector<double> tan_values(values.begin(), values.begin() + m);
    const std::vector<double> sag_values(values.begin() + m, values.end());
    fan.fields.push_back({field, fan_arm(tan_values, p), fan_arm(sag_values, p)});
  }
  return fan;
}

OpdMap opd_map(const LensSystem& system, double field_deg, int n, double wavelength_um) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "OPD grid needs n >= 2");
  std::vector<PupilSample> samples;
  std::vector<std::size_t> cells;
  for (int j = 0; j < n; ++j) {
    const double py = (j + 0.5) / n * 2.0 - 1.0;
    for (int i = 0; i < n; ++i) {
      const double px = (i + 0.5) / n * 2.0 - 1.0;
      if (px * px + py * py > 1.0) continue;
      samples.push_back({px, py, 1.0});
      cells.push_back(static_cast<std::size_t>(j) * n + i);
    }
  }
  std::vector<std::int32_t> status;
  const auto values = opd_values(system, field_deg, wavelength_um, samples, &status);
  OpdMap map;
  map.n = n;
  map.field_deg = field_deg;
  map.wavelength_um = wavelength_um;
  map.opd_waves.assign(static_cast<std::size_t>(n) * n, 0.0);
  map.mask.assign(static_cast<std::size_t>(n) * n, 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (status[k] == kernels::kVignetted) ++map.vignetted_cells;
    else if (status[k] != kernels::kCompleted) ++map.failed_cells;
    if (!std::isfinite(values[k])) continue;
    map.opd_waves[cells[k]] = values[k];
    map.mask[cells[k]] = 1;
  }
  return map;
}

double opd_rms(const OpdMap& map) {
  double sum = 0.0, count = 0.0;
  for (std::size_t i = 0; i < map.mask.size(); ++i) {
    if (!map.mask[i]) continue;
    sum += map.opd_waves[i];
    count += 1.0;
  }
  if (count == 0.0) throw Error(ErrorKind::no_unvignetted_rays, "OPD map has no valid cells");
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t i = 0; i < map.mask.size(); ++i) {
    if (!map.mask[i]) continue;
    const double d = map.opd_waves[i] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / count);
}

}  // namespace seqtrace
