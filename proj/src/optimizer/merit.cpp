#include "seqtrace/merit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "seqtrace/error.hpp"
#include "seqtrace/field_scan.hpp"
#include "seqtrace/numfmt.hpp"
#include "seqtrace/paraxial.hpp"
#include "seqtrace/spot.hpp"
#include "seqtrace/wavefront.hpp"

namespace seqtrace {

namespace {

constexpr int kSpotRings = 6;
constexpr int kOpdGrid = 32;

struct KindName {
  OperandKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {OperandKind::effl, "EFFL"},         {OperandKind::totr, "TOTR"},
    {OperandKind::dist_max, "DIST-MAX"}, {OperandKind::spot_rms, "SPOT-RMS"},
    {OperandKind::opd_rms, "OPD-RMS"},
};

bool uses_field(OperandKind k) { return k == OperandKind::spot_rms || k == OperandKind::opd_rms; }

double field_of(const LensSystem& system, const Operand& op) {
  if (op.field >= system.fields().size())
    throw Error(ErrorKind::invalid_argument, "operand field index out of range");
  return system.fields()[op.field];
}

}  // namespace

const char* to_string(OperandKind kind) {
  for (const auto& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "?";
}

const char* to_string(OperandMode mode) { return mode == OperandMode::equals ? "equals" : "less-than"; }

double operand_value(const LensSystem& system, const Operand& op) {
  switch (op.kind) {
    case OperandKind::effl:
      return system_summary(system).effl;
    case OperandKind::totr:
      return system.total_track();
    case OperandKind::dist_max: {
      double worst = 0.0;
      for (double f : system.fields())
        if (f != 0.0) worst = std::max(worst, std::abs(field_point(system, f).distortion_percent));
      return worst;
    }
    case OperandKind::spot_rms: {
      const LensSystem one = system.with_fields({field_of(system, op)});
      const SpotReport spot = spot_diagram(one, PupilPattern::hexapolar, kSpotRings);
      for (const SpotEntry& e : spot.entries)
        if (e.lost != e.vignetted) throw Error(ErrorKind::ray_misses_surface, "spot rays fail to trace");
      return spot.polychromatic_rms_um[0] * 1e-3;
    }
    case OperandKind::opd_rms: {
      const OpdMap map = opd_map(system, field_of(system, op), kOpdGrid, system.primary_wavelength());
      if (map.failed_cells > 0) throw Error(ErrorKind::ray_misses_surface, "pupil rays fail to trace");
      return opd_rms(map);
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown operand kind");
}

MeritReport merit_value(const LensSystem& system, std::span<const Operand> operands) {
  double wsum = 0.0;
  for (const Operand& op : operands) {
    if (!(op.weight >= 0.0)) throw Error(ErrorKind::invalid_argument, "operand weight must be >= 0");
    if (uses_field(op.kind)) field_of(system, op);
    wsum += op.weight;
  }
  if (!(wsum > 0.0)) throw Error(ErrorKind::empty_merit_function, "no operand has positive weight");

  MeritReport report;
  double acc = 0.0;
  for (const Operand& op : operands) {
    double value;
    try {
      value = operand_value(system, op);
    } catch (const Error& e) {
      report.penalty = true;
      report.failure = std::string(to_string(op.kind)) + ": " + e.what();
      value = std::numeric_limits<double>::quiet_NaN();
    }
    double d = value - op.target;
    if (op.mode == OperandMode::less_than) d = std::max(0.0, d);
    if (!std::isfinite(d)) report.penalty = true;
    report.operands.push_back({op, value, d, 0.0});
    acc += op.weight * d * d;
  }
  if (report.penalty || !std::isfinite(acc)) {
    report.penalty = true;
    report.value = kMeritPenalty;
    return report;
  }
  report.value = std::sqrt(acc / wsum);
  for (OperandValue& v : report.operands)
    v.contribution_percent = acc > 0.0 ? 100.0 * v.operand.weight * v.deviation * v.deviation / acc : 0.0;
  return report;
}

std::vector<Operand> parse_merit(std::string_view text) {
  std::vector<Operand> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = numfmt::split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok.size() < 3 || tok.size() > 5)
      throw ParseError(line_no, "expected `KIND target weight [mode] [field]`");
    Operand op{};
    const std::string kind = numfmt::upper(tok[0]);
    bool found = false;
    for (const auto& k : kKindNames) {
      if (kind == k.name) {
        op.kind = k.kind;
        found = true;
      }
    }
    if (!found) throw ParseError(line_no, "unknown operand kind `" + std::string(tok[0]) + "`");
    const auto target = numfmt::parse(tok[1]);
    const auto weight = numfmt::parse(tok[2]);
    if (!target || !std::isfinite(*target)) throw ParseError(line_no, "bad target");
    if (!weight || !std::isfinite(*weight) || *weight < 0.0) throw ParseError(line_no, "bad weight");
    op.target = *target;
    op.weight = *weight;
    std::size_t next = 3;
    if (next < tok.size()) {
      const std::string m = numfmt::upper(tok[next]);
      if (m == "=" || m == "EQUALS" || m == "EQ") {
        op.mode = OperandMode::equals;
        ++next;
      } else if (m == "<" || m == "LESS-THAN" || m == "LT") {
        op.mode = OperandMode::less_than;
        ++next;
      }
    }
    if (next < tok.size()) {
      const auto f = numfmt::parse(tok[next]);
      if (!f || *f < 1.0 || *f != std::floor(*f) || *f > 1e6)
        throw ParseError(line_no, "field must be a 1-based integer");
      op.field = static_cast<std::size_t>(*f) - 1;
      ++next;
    }
    if (next != tok.size()) throw ParseError(line_no, "unexpected token `" + std::string(tok[next]) + "`");
    out.push_back(op);
    if (end == text.size()) break;
  }
  return out;
}

std::vector<Operand> load_merit(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open merit file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_merit(ss.str());
}

std::string format_merit(std::span<const Operand> operands) {
  std::string out = "# KIND target weight mode field\n";
  for (const Operand& op : operands) {
    out += to_string(op.kind);
    out += ' ' + numfmt::exact(op.target) + ' ' + numfmt::exact(op.weight) + ' ' + to_string(op.mode);
    if (uses_field(op.kind)) out += ' ' + std::to_string(op.field + 1);
    out += '\n';
  }
  return out;
}

}  // namespace seqtrace
