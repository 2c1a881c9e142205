#include "seqtrace/glass.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "seqtrace/error.hpp"
#include "seqtrace/numfmt.hpp"

namespace seqtrace::glass {

extern const char* const kDefaultCatalogText;

namespace {

std::atomic<std::uint64_t> g_extrapolations{0};

double index_squared(DispersionModel model, const Material::Coefficients& c, double lambda) {
  const double l2 = lambda * lambda;
  switch (model) {
    case DispersionModel::constant:
      return c[0] * c[0];
    case DispersionModel::sellmeier:
      return 1.0 + c[0] * l2 / (l2 - c[3]) + c[1] * l2 / (l2 - c[4]) + c[2] * l2 / (l2 - c[5]);
    case DispersionModel::schott: {
      const double il2 = 1.0 / l2;
      return c[0] + c[1] * l2 + il2 * (c[2] + il2 * (c[3] + il2 * (c[4] + il2 * c[5])));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::optional<DispersionModel> model_from_token(std::string_view token) {
  const std::string up = numfmt::upper(token);
  if (up == "CONSTANT") return DispersionModel::constant;
  if (up == "SELLMEIER") return DispersionModel::sellmeier;
  if (up == "SCHOTT") return DispersionModel::schott;
  return std::nullopt;
}

}  // namespace

const char* to_string(DispersionModel model) {
  switch (model) {
    case DispersionModel::constant: return "CONSTANT";
    case DispersionModel::sellmeier: return "SELLMEIER";
    case DispersionModel::schott: return "SCHOTT";
  }
  return "?";
}

Material::Material(std::string name, DispersionModel model, Coefficients coefficients,
                   double lambda_min, double lambda_max)
    : name_(std::move(name)),
      model_(model),
      coefficients_(coefficients),
      lambda_min_(lambda_min),
      lambda_max_(lambda_max) {
  if (name_.empty()) throw Error(ErrorKind::invalid_argument, "material name is empty");
  if (!(lambda_min_ < lambda_max_))
    throw Error(ErrorKind::invalid_argument, "material " + name_ + ": empty valid range");
  const double n = refractive_index(kLineD);
  if (!(n > 0.9))
    throw Error(ErrorKind::model_evaluation_failure,
                "material " + name_ + ": index at d-line is " + numfmt::general(n, 8));
}

Material Material::air() {
  Material m("AIR", DispersionModel::constant, {1.0, 0, 0, 0, 0, 0}, 0.0,
             std::numeric_limits<double>::infinity());
  m.is_air_ = true;
  return m;
}

Material Material::constant(std::string name, double index) {
  return Material(std::move(name), DispersionModel::constant, {index, 0, 0, 0, 0, 0}, 0.0,
                  std::numeric_limits<double>::infinity());
}

double Material::refractive_index(double wavelength_um) const {
  if (is_air_) return 1.0;
  if (!(wavelength_um > 0.0))
    throw Error(ErrorKind::model_evaluation_failure, "non-positive wavelength");
  if (wavelength_um < lambda_min_ || wavelength_um > lambda_max_)
    g_extrapolations.fetch_add(1, std::memory_order_relaxed);
  const double n2 = index_squared(model_, coefficients_, wavelength_um);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw Error(ErrorKind::model_evaluation_failure,
                "material " + name_ + ": n^2 <= 0 at " + numfmt::general(wavelength_um, 6) + " um");
  return model_ == DispersionModel::constant ? coefficients_[0] : std::sqrt(n2);
}

bool Material::operator==(const Material& other) const {
  return name_ == other.name_ && model_ == other.model_ && coefficients_ == other.coefficients_ &&
         lambda_min_ == other.lambda_min_ && lambda_max_ == other.lambda_max_ &&
         is_air_ == other.is_air_;
}

double refractive_index(const Material& material, double wavelength_um) {
  return material.refractive_index(wavelength_um);
}

double abbe_number(const Material& material) {
  const double nd = material.refractive_index(kLineD);
  const double nf = material.refractive_index(kLineF);
  const double nc = material.refractive_index(kLineC);
  if (std::abs(nd - 1.0) < 1e-9 || std::abs(nf - nc) < 1e-12)
    throw Error(ErrorKind::undefined_abbe, "material " + material.name() + " has no Abbe number");
  return (nd - 1.0) / (nf - nc);
}

std::uint64_t extrapolation_warning_count() { return g_extrapolations.load(); }

void GlassCatalog::add(Material material) {
  const std::string key = numfmt::upper(material.name());
  if (key == "AIR") throw Error(ErrorKind::invalid_argument, "AIR is a reserved material name");
  if (by_key_.count(key)) throw Error(ErrorKind::duplicate_glass, "duplicate glass " + material.name());
  by_key_.emplace(key, entries_.size());
  entries_.push_back(std::move(material));
}

const Material* GlassCatalog::find(std::string_view name) const {
  static const Material kAir = Material::air();
  const std::string key = numfmt::upper(name);
  if (key == "AIR") return &kAir;
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &entries_[it->second];
}

const Material& GlassCatalog::at(std::string_view name) const {
  const Material* m = find(name);
  if (!m) throw Error(ErrorKind::unknown_material, "unknown material " + std::string(name));
  return *m;
}

std::size_t GlassCatalog::index_of(std::string_view name) const {
  auto it = by_key_.find(numfmt::upper(name));
  return it == by_key_.end() ? entries_.size() : it->second;
}

GlassPoint GlassCatalog::point(std::size_t i) const {
  const Material& m = entries_.at(i);
  const double nd = m.refractive_index(kLineD);
  double vd = std::numeric_limits<double>::quiet_NaN();
  try {
    vd = abbe_number(m);
  } catch (const Error&) {
  }
  return {nd, vd};
}

GlassCatalog parse_catalog(std::string_view text) {
  GlassCatalog catalog;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = numfmt::split_ws(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (tokens.size() != 10)
      throw ParseError(line_no, "expected 10 fields (name model c1..c6 lmin lmax), got " +
                                    std::to_string(tokens.size()));
    const auto model = model_from_token(tokens[1]);
    if (!model)
      throw Error(ErrorKind::unknown_dispersion_model,
                  "line " + std::to_string(line_no) + ": unknown dispersion model " +
                      std::string(tokens[1]));
    Material::Coefficients c{};
    for (std::size_t k = 0; k < 6; ++k) {
      auto v = numfmt::parse(tokens[2 + k]);
      if (!v || !std::isfinite(*v))
        throw ParseError(line_no, "bad coefficient '" + std::string(tokens[2 + k]) + "'");
      c[k] = *v;
    }
    auto lmin = numfmt::parse(tokens[8]);
    auto lmax = numfmt::parse(tokens[9]);
    if (!lmin || !lmax) throw ParseError(line_no, "bad wavelength range");
    try {
      catalog.add(Material(std::string(tokens[0]), *model, c, *lmin, *lmax));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::duplicate_glass) throw;
      if (e.kind() == ErrorKind::model_evaluation_failure)
        throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      throw ParseError(line_no, e.what());
    }
    if (eol == text.size()) break;
  }
  return catalog;
}

GlassCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open catalog " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

std::string format_catalog(const GlassCatalog& catalog) {
  std::string out = "# name model c1 c2 c3 c4 c5 c6 lambda_min_um lambda_max_um\n";
  for (const auto& m : catalog.entries()) {
    out += m.name();
    out += ' ';
    out += to_string(m.model());
    for (double c : m.coefficients()) {
      out += ' ';
      out += numfmt::exact(c);
    }
    out += ' ';
    out += numfmt::exact(m.lambda_min());
    out += ' ';
    out += numfmt::exact(m.lambda_max());
    out += '\n';
  }
  return out;
}

void write_catalog(const GlassCatalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write catalog " + path.string());
  out << format_catalog(catalog);
  if (!out) throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

const GlassCatalog& default_catalog() {
  static const GlassCatalog catalog = parse_catalog(kDefaultCatalogText);
  return catalog;
}

}  // namespace seqtrace::glass
