#pragma once

#include <string>
#include <vector>

#include "seqtrace/diffraction.hpp"
#include "seqtrace/field_scan.hpp"
#include "seqtrace/optimize.hpp"
#include "seqtrace/paraxial.hpp"
#include "seqtrace/seidel.hpp"
#include "seqtrace/spot.hpp"
#include "seqtrace/trace.hpp"
#include "seqtrace/wavefront.hpp"

// Text emitters. Every CSV starts with a header row and uses `.` decimals; the
// SVG plots are drawn from the same numbers and never change them.
namespace seqtrace::report {

struct MtfSet {
  double field_deg;
  MtfCurve curve;
};

std::string summary_csv(const LensSystem& system, const ParaxialSummary& summary);
// Per field × wavelength radius table.
std::string spot_csv(const SpotReport& spots);
// Every traced image-plane hit.
std::string spot_points_csv(const SpotReport& spots);
std::string mtf_csv(const std::vector<MtfSet>& curves);
std::string opd_csv(const OpdFan& fan);
std::string seidel_csv(const SeidelTable& table);
std::string field_csv(const FieldScan& scan);
// Central `half`-pixel neighbourhood of the PSF (the whole grid when half ≤ 0).
std::string psf_csv(const Psf& psf, int half = 0);
std::string trace_csv(const TraceResult& result);
std::string local_history_csv(const LocalResult& result);
std::string hammer_history_csv(const HammerResult& result);

std::string mtf_svg(const std::vector<MtfSet>& curves);
std::string opd_svg(const OpdFan& fan);
std::string field_svg(const FieldScan& scan);
std::string distortion_svg(const FieldScan& scan);
std::string spot_svg(const SpotReport& spots);
std::string psf_svg(const Psf& psf, int half);

// Minimal line/scatter plot used by the emitters above.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false;  // scatter instead of a polyline
  int color = -1;        // palette index; -1 uses the series position
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // Axis limits; NaN means derive from the data.
  double x_min, x_max, y_min, y_max;
};

Plot make_plot(std::string title, std::string x_label, std::string y_label);
std::string render_svg(const Plot& plot);

}  // namespace seqtrace::report
