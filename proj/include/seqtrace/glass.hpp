#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seqtrace::glass {

// Fraunhofer lines, µm.
inline constexpr double kLineF = 0.48613;
inline constexpr double kLineD = 0.58756;
inline constexpr double kLineC = 0.65627;

enum class DispersionModel {
  constant,   // n = c1
  sellmeier,  // n² − 1 = Σ Bᵢλ²/(λ² − Cᵢ); coefficients B1 B2 B3 C1 C2 C3
  schott,     // n² = a0 + a1λ² + a2λ⁻² + a3λ⁻⁴ + a4λ⁻⁶ + a5λ⁻⁸
};

const char* to_string(DispersionModel model);

class Material {
 public:
  using Coefficients = std::array<double, 6>;

  // Validates that n(λ_d) is real and > 0.9 (ModelEvaluationFailure otherwise).
  Material(std::string name, DispersionModel model, Coefficients coefficients, double lambda_min,
           double lambda_max);

  static Material air();
  static Material constant(std::string name, double index);

  const std::string& name() const { return name_; }
  DispersionModel model() const { return model_; }
  const Coefficients& coefficients() const { return coefficients_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  bool is_air() const { return is_air_; }

  // Out-of-range wavelengths are extrapolated and counted (see extrapolation_warning_count).
  double refractive_index(double wavelength_um) const;

  bool operator==(const Material& other) const;

 private:
  std::string name_;
  DispersionModel model_;
  Coefficients coefficients_;
  double lambda_min_;
  double lambda_max_;
  bool is_air_ = false;
};

double refractive_index(const Material& material, double wavelength_um);

// V_d = (n_d − 1)/(n_F − n_C). Throws UndefinedAbbe for non-dispersive media.
double abbe_number(const Material& material);

// Number of out-of-range index evaluations since process start.
std::uint64_t extrapolation_warning_count();

struct GlassPoint {
  double nd;
  double vd;
};

class GlassCatalog {
 public:
  // Throws DuplicateGlass (case-insensitive name clash) or InvalidArgument for "AIR".
  void add(Material material);

  // Case-insensitive; "AIR" always resolves to the built-in air.
  const Material* find(std::string_view name) const;
  const Material& at(std::string_view name) const;  // UnknownMaterial when absent

  const std::vector<Material>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Index of the named entry in load order, or size() when absent.
  std::size_t index_of(std::string_view name) const;

  // (n_d, V_d) of entry i; V_d is NaN for non-dispersive entries.
  GlassPoint point(std::size_t i) const;

 private:
  std::vector<Material> entries_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

GlassCatalog parse_catalog(std::string_view text);
GlassCatalog load_catalog(const std::filesystem::path& path);

// Canonical text form; reloading reproduces every coefficient bit-for-bit.
std::string format_catalog(const GlassCatalog& catalog);
void write_catalog(const GlassCatalog& catalog, const std::filesystem::path& path);

// The catalog shipped in data/glass/default.cat, embedded at build time.
const GlassCatalog& default_catalog();

}  // namespace seqtrace::glass
