#include "seqtrace/spot.hpp"

#include <algorithm>
#include <cmath>

#include "seqtrace/aim.hpp"
#include "seqtrace/detail/beam.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/kernels.hpp"
#include "seqtrace/paraxial.hpp"

namespace seqtrace {

SpotReport spot_diagram(const LensSystem& system, PupilPattern pattern, int n) {
  const auto samples = sample_pupil(pattern, n);
  const ParaxialSummary summary = system_summary(system);
  const double primary = system.primary_wavelength();

  SpotReport report;
  report.airy_radius_um = 1.22 * primary * summary.fno;
  kernels::RayBatch batch;
  for (double field : system.fields()) {
    const LaunchFrame frame = aim_chief_ray(system, field, primary);
    double poly_sum = 0.0, poly_weight = 0.0;
    std::size_t field_hits = 0;
    const std::size_t first_entry = report.entries.size();
    for (const Wavelength& wl : system.wavelengths()) {
      const auto constants = kernels::surface_constants(system, wl.um);
      detail::fill_beam(frame, samples, batch);
      kernels::trace_batch(constants, batch);

      kernels::RayBatch chief(1);
      chief.set(0, frame.origin(0.0, 0.0), frame.direction);
      kernels::trace_batch(constants, chief);

      SpotEntry e{field, wl.um, {}, {0.0, 0.0}, {chief.x[0], chief.y[0]}, 0.0, 0.0,
                  samples.size(), 0, 0};
      double sx = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch.status[i] != kernels::kCompleted) {
          ++e.lost;
          if (batch.status[i] == kernels::kVignetted) ++e.vignetted;
          continue;
        }
        e.hits.push_back({batch.x[i], batch.y[i]});
        sx += batch.x[i];
        sy += batch.y[i];
      }
      if (!e.hits.empty()) {
        const double m = static_cast<double>(e.hits.size());
        e.centroid = {sx / m, sy / m};
        double ss = 0.0, geo = 0.0;
        for (const SpotPoint& p : e.hits) {
          const double cx = p.x - e.centroid.x, cy = p.y - e.centroid.y;
          ss += cx * cx + cy * cy;
          geo = std::max(geo, std::hypot(p.x - e.chief.x, p.y - e.chief.y));
        }
        e.rms_radius_um = std::sqrt(ss / m) * 1e3;
        e.geo_radius_um = geo * 1e3;
        if (chief.status[0] != kernels::kCompleted) e.chief = e.centroid;
      }
      field_hits += e.hits.size();
      report.entries.push_back(std::move(e));
    }
    if (field_hits == 0)
      throw Error(ErrorKind::no_unvignetted_rays, "every ray of the field is lost");

    // Polychromatic RMS about the weighted centroid of all wavelengths.
    double cx = 0.0, cy = 0.0;
    for (std::size_t k = first_entry; k < report.entries.size(); ++k) {
      const SpotEntry& e = report.entries[k];
      if (e.hits.empty()) continue;
      const double w = system.wavelengths()[k - first_entry].weight / e.hits.size();
      for (const SpotPoint& p : e.hits) {
        cx += w * p.x;
        cy += w * p.y;
        poly_weight += w;
      }
    }
    if (poly_weight > 0.0) {
      cx /= poly_weight;
      cy /= poly_weight;
      for (std::size_t k = first_entry; k < report.entries.size(); ++k) {
        const SpotEntry& e = report.entries[k];
        if (e.hits.empty()) continue;
        const double w = system.wavelengths()[k - first_entry].weight / e.hits.size();
        for (const SpotPoint& p : e.hits) poly_sum += w * ((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy));
      }
      report.polychromatic_rms_um.push_back(std::sqrt(poly_sum / poly_weight) * 1e3);
    } else {
      report.polychromatic_rms_um.push_back(0.0);
    }
  }
  return report;
}

}  // namespace seqtrace
