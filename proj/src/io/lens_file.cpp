#include "seqtrace/lens_file.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "seqtrace/error.hpp"
#include "seqtrace/numfmt.hpp"

namespace seqtrace {

namespace {

double number(std::string_view tok, std::size_t line, const char* what) {
  const auto v = numfmt::parse(tok);
  if (!v || std::isnan(*v)) throw ParseError(line, std::string("bad ") + what + " `" + std::string(tok) + "`");
  return *v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open lens file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* profile_token(const Profile& p) {
  switch (p.kind()) {
    case ProfileKind::plano: return "PLANO";
    case ProfileKind::sphere: return "SPHERE";
    case ProfileKind::conic: return "CONIC";
  }
  return "?";
}

}  // namespace

LensSystem parse_lens(std::string_view text, const glass::GlassCatalog& catalog) {
  std::vector<Wavelength> wavelengths;
  std::vector<double> fields;
  std::optional<double> epd;
  std::size_t primary = 1;
  std::vector<SurfaceNode> surfaces;
  bool in_surfaces = false, seen_image = false;
  bool have_wl = false, have_fields = false;

  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = numfmt::split_ws(line);
    if (tok.empty()) continue;
    const std::string key = numfmt::upper(tok[0]);

    if (!in_surfaces) {
      if (key == "WAVELENGTHS") {
        if (tok.size() < 3 || tok.size() % 2 == 0)
          throw ParseError(line_no, "WAVELENGTHS expects wavelength/weight pairs");
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2)
          wavelengths.push_back({number(tok[i], line_no, "wavelength"), number(tok[i + 1], line_no, "weight")});
        have_wl = true;
      } else if (key == "PRIMARY") {
        if (tok.size() != 2) throw ParseError(line_no, "PRIMARY expects one index");
        const double p = number(tok[1], line_no, "primary index");
        if (p < 1.0 || p != std::floor(p) || p > 1e6) throw ParseError(line_no, "PRIMARY must be a 1-based index");
        primary = static_cast<std::size_t>(p);
      } else if (key == "FIELDS") {
        if (tok.size() < 2) throw ParseError(line_no, "FIELDS expects at least one angle");
        for (std::size_t i = 1; i < tok.size(); ++i) fields.push_back(number(tok[i], line_no, "field"));
        have_fields = true;
      } else if (key == "EPD") {
        if (tok.size() != 2) throw ParseError(line_no, "EPD expects one value");
        epd = number(tok[1], line_no, "EPD");
      } else if (key == "SURFACES") {
        in_surfaces = true;
      } else {
        throw ParseError(line_no, "unknown keyword `" + std::string(tok[0]) + "`");
      }
      continue;
    }

    if (seen_image) throw ParseError(line_no, "rows after the IMG surface");
    if (key != "SRF" && key != "STOP" && key != "IMG")
      throw ParseError(line_no, "surface tag must be SRF, STOP or IMG");
    if (tok.size() < 5 || tok.size() > 7)
      throw ParseError(line_no, "expected `TAG PROFILE radius thickness material [conic] [semi-diameter]`");
    const std::string kind = numfmt::upper(tok[1]);
    const double radius = number(tok[2], line_no, "radius");
    const double thickness = number(tok[3], line_no, "thickness");
    const double conic = tok.size() >= 6 ? number(tok[5], line_no, "conic constant") : 0.0;
    const double sd = tok.size() >= 7 ? number(tok[6], line_no, "semi-diameter") : kUnbounded;
    SurfaceNode node;
    try {
      if (std::isinf(radius) || kind == "PLANO") {
        if (!std::isinf(radius)) throw ParseError(line_no, "PLANO surfaces need radius `inf`");
        node.profile = Profile::plano();
      } else if (kind == "SPHERE") {
        if (conic != 0.0) throw ParseError(line_no, "SPHERE with a non-zero conic constant");
        node.profile = Profile::sphere(radius);
      } else if (kind == "CONIC") {
        node.profile = Profile::conic(radius, conic);
      } else {
        throw ParseError(line_no, "unknown profile `" + std::string(tok[1]) + "`");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    node.thickness = thickness;
    node.material_after = catalog.at(tok[4]);
    node.semi_diameter = sd;
    node.is_stop = key == "STOP";
    surfaces.push_back(std::move(node));
    seen_image = key == "IMG";
  }
  if (!have_wl) throw ParseError(line_no, "missing WAVELENGTHS");
  if (!have_fields) throw ParseError(line_no, "missing FIELDS");
  if (!epd) throw ParseError(line_no, "missing EPD");
  if (!in_surfaces || surfaces.empty()) throw ParseError(line_no, "missing SURFACES table");
  if (!seen_image) throw ParseError(line_no, "surface table must end with an IMG row");
  return LensSystem(std::move(surfaces), *epd, std::move(fields), std::move(wavelengths), primary - 1);
}

LensSystem parse_lens(std::string_view text) { return parse_lens(text, glass::default_catalog()); }

LensSystem load_lens(const std::filesystem::path& path, const glass::GlassCatalog& catalog) {
  return parse_lens(read_file(path), catalog);
}

LensSystem load_lens(const std::filesystem::path& path) {
  return load_lens(path, glass::default_catalog());
}

std::string format_lens(const LensSystem& system) {
  std::string out = "WAVELENGTHS";
  for (const Wavelength& w : system.wavelengths()) out += ' ' + numfmt::exact(w.um) + ' ' + numfmt::exact(w.weight);
  out += "\nPRIMARY " + std::to_string(system.primary_index() + 1);
  out += "\nFIELDS";
  for (double f : system.fields()) out += ' ' + numfmt::exact(f);
  out += "\nEPD " + numfmt::exact(system.entrance_pupil_diameter());
  out += "\nSURFACES\n# tag profile radius thickness material conic semi-diameter\n";
  for (std::size_t i = 0; i < system.size(); ++i) {
    const SurfaceNode& s = system.surface(i);
    out += i == system.image_index() ? "IMG" : s.is_stop ? "STOP" : "SRF";
    out += ' ';
    out += profile_token(s.profile);
    out += ' ' + numfmt::exact(s.profile.radius());
    out += ' ' + numfmt::exact(s.thickness);
    out += ' ' + s.material_after.name();
    out += ' ' + numfmt::exact(s.profile.conic_constant());
    out += ' ' + numfmt::exact(s.semi_diameter);
    out += '\n';
  }
  return out;
}

void write_lens(const LensSystem& system, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write lens file " + path.string());
  out << format_lens(system);
  if (!out) throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

}  // namespace seqtrace
