#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqtrace/system.hpp"

namespace seqtrace {

enum class OperandKind { effl, totr, dist_max, spot_rms, opd_rms };
enum class OperandMode { equals, less_than };

const char* to_string(OperandKind kind);
const char* to_string(OperandMode mode);

// Native units: EFFL, TOTR and SPOT-RMS in mm (polychromatic RMS spot radius),
// DIST-MAX in percent (max |distortion| over the system fields), OPD-RMS in
// waves at the primary wavelength with piston removed. Rays that miss a surface or
// hit TIR (as opposed to being vignetted) make SPOT-RMS and OPD-RMS fail.
struct Operand {
  OperandKind kind;
  double target = 0.0;
  double weight = 1.0;
  OperandMode mode = OperandMode::equals;
  std::size_t field = 0;  // index into the system fields (SPOT-RMS, OPD-RMS)
};

struct OperandValue {
  Operand operand;
  double value;
  double deviation;             // value − target, clamped at 0 for satisfied less-than
  double contribution_percent;  // share of Σ w·d²
};

inline constexpr double kMeritPenalty = 1e10;

struct MeritReport {
  double value = 0.0;  // sqrt(Σ w·d² / Σ w)
  std::vector<OperandValue> operands;
  bool penalty = false;  // an analysis failed; value is kMeritPenalty
  std::string failure;
};

// Throws EmptyMeritFunction when no operand has positive weight. Analysis
// failures become the penalty value instead of throwing.
MeritReport merit_value(const LensSystem& system, std::span<const Operand> operands);

// Evaluates a single operand (throws on analysis failure).
double operand_value(const LensSystem& system, const Operand& operand);

// Merit file: one operand per line, `KIND target weight [mode] [field]`, `#`
// comments. Mode is `=`/`equals` or `<`/`less-than`; field is 1-based.
std::vector<Operand> parse_merit(std::string_view text);
std::vector<Operand> load_merit(const std::filesystem::path& path);
std::string format_merit(std::span<const Operand> operands);

}  // namespace seqtrace
