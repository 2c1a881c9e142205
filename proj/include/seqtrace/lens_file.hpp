#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "seqtrace/glass.hpp"
#include "seqtrace/system.hpp"

// Lens prescription text format:
//
//   WAVELENGTHS  λ1 w1  λ2 w2 ...      (µm, weight pairs)
//   PRIMARY      k                     (1-based, default 1)
//   FIELDS       θ1 θ2 ...             (degrees)
//   EPD          d                     (mm)
//   SURFACES
//   TAG PROFILE radius thickness material [conic] [semi-diameter]
//   ...
//
// TAG is SRF, STOP or IMG (last row); PROFILE is PLANO, SPHERE or CONIC; radius
// `inf` always means plano. `#` starts a comment.
namespace seqtrace {

LensSystem parse_lens(std::string_view text, const glass::GlassCatalog& catalog);
LensSystem parse_lens(std::string_view text);  // default catalog
LensSystem load_lens(const std::filesystem::path& path, const glass::GlassCatalog& catalog);
LensSystem load_lens(const std::filesystem::path& path);

// Canonical form: fixed column order, 17 significant digits.
std::string format_lens(const LensSystem& system);
void write_lens(const LensSystem& system, const std::filesystem::path& path);

}  // namespace seqtrace
