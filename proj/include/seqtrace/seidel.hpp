#pragma once

#include <array>
#include <vector>

#include "seqtrace/paraxial.hpp"
#include "seqtrace/system.hpp"

namespace seqtrace {

// S_I spherical, S_II coma, S_III astigmatism, S_IV Petzval, S_V distortion.
struct SeidelRow {
  std::array<double, 5> length{};  // mm
  std::array<double, 5> waves{};   // length / primary wavelength
};

struct SeidelTable {
  std::vector<SeidelRow> rows;  // one per refracting surface, image plane excluded
  SeidelRow sum;
  double wavelength;  // µm
};

// Normalization: marginal ray from infinity at EPD/2, chief ray at the maximum field.
SeidelTable seidel_table(const LensSystem& system);

// Seidel sums for arbitrary paraxial marginal/chief ray starts (e.g. finite conjugates).
SeidelTable seidel_table_from_rays(const LensSystem& system, ParaxialRayStart marginal,
                                   ParaxialRayStart chief, double wavelength_um);

}  // namespace seqtrace
