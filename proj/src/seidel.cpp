#include "seqtrace/seidel.hpp"

#include <cmath>

#include "seqtrace/error.hpp"

namespace seqtrace {

SeidelTable seidel_table(const LensSystem& system) {
  const double lambda = system.primary_wavelength();
  // Surfaces the error contract: afocal systems have no Seidel normalization.
  (void)system_summary(system, lambda);
  return seidel_table_from_rays(system, marginal_ray_start(system),
                                chief_ray_start(system, system.max_field(), lambda), lambda);
}

SeidelTable seidel_table_from_rays(const LensSystem& system, ParaxialRayStart marginal,
                                   ParaxialRayStart chief, double wavelength_um) {
  const auto m = paraxial_trace(system, marginal.y, marginal.u, wavelength_um);
  const auto c = paraxial_trace(system, chief.y, chief.u, wavelength_um);
  const double lambda_mm = wavelength_um * 1e-3;

  SeidelTable table;
  table.wavelength = wavelength_um;
  const std::size_t count = system.image_index();
  table.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double n = m[i].n_before;
    const double np = m[i].n_after;
    const double curv = m[i].curvature;
    const double y = m[i].y;
    const double ybar = c[i].y;
    const double a = n * (y * curv + m[i].u_before);
    const double abar = n * (ybar * curv + c[i].u_before);
    const double lagrange = n * (m[i].u_before * ybar - c[i].u_before * y);
    const double d_u_n = m[i].u_after / np - m[i].u_before / n;
    const double d_inv_n = 1.0 / np - 1.0 / n;
    const double d_inv_n2 = 1.0 / (np * np) - 1.0 / (n * n);

    SeidelRow row;
    auto& s = row.length;
    s[0] = -a * a * y * d_u_n;
    s[1] = -a * abar * y * d_u_n;
    s[2] = -abar * abar * y * d_u_n;
    s[3] = -lagrange * lagrange * curv * d_inv_n;
    // Non-singular form of (Ā/A)(S_III + S_IV).
    s[4] = abar * (-abar * abar * y * d_inv_n2 + curv * ybar * d_inv_n * (2.0 * abar * y - a * ybar));

    const double k = system.surface(i).profile.conic_constant();
    if (k != 0.0 && y != 0.0) {
      const double asph = k * curv * curv * curv * y * y * y * y * (np - n);
      const double ratio = ybar / y;
      s[0] += asph;
      s[1] += asph * ratio;
      s[2] += asph * ratio * ratio;
      s[4] += asph * ratio * ratio * ratio;
    }
    for (std::size_t j = 0; j < 5; ++j) {
      row.waves[j] = s[j] / lambda_mm;
      table.sum.length[j] += s[j];
      table.sum.waves[j] += row.waves[j];
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace seqtrace
