#include "seqtrace/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "seqtrace/numfmt.hpp"

namespace seqtrace::report {

namespace {

using numfmt::exact;
using numfmt::fixed;
using numfmt::general;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kPalette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#17a2b8"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double tick_step(double span, int target) {
  if (!(span > 0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

void limits(const Plot& plot, bool x_axis, double& lo, double& hi) {
  lo = x_axis ? plot.x_min : plot.y_min;
  hi = x_axis ? plot.x_max : plot.y_max;
  double dlo = HUGE_VAL, dhi = -HUGE_VAL;
  for (const auto& s : plot.series)
    for (double v : x_axis ? s.x : s.y)
      if (std::isfinite(v)) dlo = std::min(dlo, v), dhi = std::max(dhi, v);
  if (!std::isfinite(dlo)) dlo = 0.0, dhi = 1.0;
  if (std::isnan(lo)) lo = dlo;
  if (std::isnan(hi)) hi = dhi;
  if (hi <= lo) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
}

std::string sig(double v) { return general(v, 6); }

}  // namespace

std::string summary_csv(const LensSystem& system, const ParaxialSummary& s) {
  std::ostringstream o;
  o << "quantity,value,unit\n";
  o << "effl," << exact(s.effl) << ",mm\n";
  o << "bfl," << exact(s.bfl) << ",mm\n";
  o << "totr," << exact(s.totr) << ",mm\n";
  o << "fno," << exact(s.fno) << ",\n";
  o << "epd," << exact(system.entrance_pupil_diameter()) << ",mm\n";
  o << "entrance_pupil_position," << exact(s.entrance_pupil.position) << ",mm\n";
  o << "entrance_pupil_diameter," << exact(s.entrance_pupil.diameter) << ",mm\n";
  o << "exit_pupil_z," << exact(s.exit_pupil_z) << ",mm\n";
  o << "lagrange_invariant," << exact(s.lagrange_invariant) << ",mm\n";
  o << "primary_wavelength," << exact(s.wavelength) << ",um\n";
  for (std::size_t i = 0; i < s.image_heights.size(); ++i)
    o << "image_height_field_" << i + 1 << "," << exact(s.image_heights[i]) << ",mm\n";
  return o.str();
}

std::string spot_csv(const SpotReport& spots) {
  std::ostringstream o;
  o << "field_deg,wavelength_um,rms_radius_um,geo_radius_um,centroid_x_mm,centroid_y_mm,chief_y_mm,"
       "launched,lost,vignetted,poly_rms_um,airy_radius_um\n";
  const std::size_t per_field =
      spots.polychromatic_rms_um.empty() ? 1 : spots.entries.size() / spots.polychromatic_rms_um.size();
  for (std::size_t i = 0; i < spots.entries.size(); ++i) {
    const auto& e = spots.entries[i];
    const std::size_t f = i / std::max<std::size_t>(per_field, 1);
    const double poly = f < spots.polychromatic_rms_um.size() ? spots.polychromatic_rms_um[f] : kNaN;
    o << exact(e.field_deg) << ',' << exact(e.wavelength_um) << ',' << exact(e.rms_radius_um) << ','
      << exact(e.geo_radius_um) << ',' << exact(e.centroid.x) << ',' << exact(e.centroid.y) << ','
      << exact(e.chief.y) << ',' << e.launched << ',' << e.lost << ',' << e.vignetted << ',' << exact(poly)
      << ',' << exact(spots.airy_radius_um) << '\n';
  }
  return o.str();
}

std::string spot_points_csv(const SpotReport& spots) {
  std::ostringstream o;
  o << "field_deg,wavelength_um,x_mm,y_mm\n";
  for (const auto& e : spots.entries)
    for (const auto& h : e.hits)
      o << exact(e.field_deg) << ',' << exact(e.wavelength_um) << ',' << exact(h.x) << ',' << exact(h.y) << '\n';
  return o.str();
}

std::string mtf_csv(const std::vector<MtfSet>& curves) {
  std::ostringstream o;
  o << "field_deg,frequency_cyc_per_mm,tangential,sagittal,diffraction_limit\n";
  for (const auto& c : curves) {
    const auto& m = c.curve;
    for (std::size_t k = 0; k < m.frequency.size(); ++k)
      o << exact(c.field_deg) << ',' << exact(m.frequency[k]) << ',' << exact(m.tangential[k]) << ','
        << exact(m.sagittal[k]) << ',' << exact(diffraction_limited_mtf(m.frequency[k] / m.cutoff)) << '\n';
  }
  return o.str();
}

std::string opd_csv(const OpdFan& fan) {
  std::ostringstream o;
  o << "field_deg,arm,pupil,opd_waves,wavelength_um\n";
  for (const auto& f : fan.fields) {
    for (const auto& s : f.tangential)
      o << exact(f.field_deg) << ",tangential," << exact(s.p) << ',' << exact(s.opd_waves) << ','
        << exact(fan.wavelength_um) << '\n';
    for (const auto& s : f.sagittal)
      o << exact(f.field_deg) << ",sagittal," << exact(s.p) << ',' << exact(s.opd_waves) << ','
        << exact(fan.wavelength_um) << '\n';
  }
  return o.str();
}

std::string seidel_csv(const SeidelTable& t) {
  std::ostringstream o;
  o << "surface,SI_waves,SII_waves,SIII_waves,SIV_waves,SV_waves,SI_mm,SII_mm,SIII_mm,SIV_mm,SV_mm\n";
  auto row = [&](const std::string& label, const SeidelRow& r) {
    o << label;
    for (double v : r.waves) o << ',' << exact(v);
    for (double v : r.length) o << ',' << exact(v);
    o << '\n';
  };
  for (std::size_t i = 0; i < t.rows.size(); ++i) row(std::to_string(i + 1), t.rows[i]);
  row("SUM", t.sum);
  return o.str();
}

std::string field_csv(const FieldScan& scan) {
  std::ostringstream o;
  o << "field_deg,tangential_shift_mm,sagittal_shift_mm,real_height_mm,paraxial_height_mm,distortion_percent\n";
  for (const auto& p : scan.points)
    o << exact(p.field_deg) << ',' << exact(p.tangential_shift_mm) << ',' << exact(p.sagittal_shift_mm) << ','
      << exact(p.real_height_mm) << ',' << exact(p.paraxial_height_mm) << ',' << exact(p.distortion_percent)
      << '\n';
  return o.str();
}

std::string psf_csv(const Psf& psf, int half) {
  const int c = psf.size / 2;
  if (half <= 0 || half > c) half = c;
  const int lo = c - half, hi = std::min(c + half, psf.size - 1);
  std::ostringstream o;
  o << "x_um,y_um,relative_irradiance\n";
  for (int r = lo; r <= hi; ++r)
    for (int col = lo; col <= hi; ++col)
      o << exact((col - c) * psf.pixel_um) << ',' << exact((r - c) * psf.pixel_um) << ','
        << exact(psf.intensity[static_cast<std::size_t>(r) * psf.size + col]) << '\n';
  return o.str();
}

std::string trace_csv(const TraceResult& result) {
  std::ostringstream o;
  o << "surface,x_mm,y_mm,z_mm,l,m,n,incidence_deg,refraction_deg,n_before,n_after,path_mm\n";
  constexpr double deg = 180.0 / 3.14159265358979323846;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& h = result.records[i];
    o << i + 1 << ',' << exact(h.point.x) << ',' << exact(h.point.y) << ',' << exact(h.point.z) << ','
      << exact(h.direction.x) << ',' << exact(h.direction.y) << ',' << exact(h.direction.z) << ','
      << exact(h.incidence_angle * deg) << ',' << exact(h.refraction_angle * deg) << ',' << exact(h.n_before)
      << ',' << exact(h.n_after) << ',' << exact(h.path_length) << '\n';
  }
  return o.str();
}

std::string local_history_csv(const LocalResult& result) {
  std::ostringstream o;
  o << "step,merit\n";
  for (std::size_t i = 0; i < result.mf_trace.size(); ++i) o << i << ',' << exact(result.mf_trace[i]) << '\n';
  return o.str();
}

std::string hammer_history_csv(const HammerResult& result) {
  std::ostringstream o;
  o << "iteration,move,candidate_mf,incumbent_mf,flags\n";
  o << "0,initial," << exact(result.initial_mf) << ',' << exact(result.initial_mf) << ",\n";
  for (const auto& e : result.history)
    o << e.iteration << ',' << e.move << ',' << exact(e.candidate_mf) << ',' << exact(e.incumbent_mf) << ','
      << e.flags << '\n';
  return o.str();
}

Plot make_plot(std::string title, std::string x_label, std::string y_label) {
  return Plot{std::move(title), std::move(x_label), std::move(y_label), {}, kNaN, kNaN, kNaN, kNaN};
}

namespace {

const char* const kSvgHead = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

void open_svg(std::ostream& o, double w, double h) {
  o << kSvgHead << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

// One framed panel of width W at horizontal offset ox.
void draw_panel(std::ostream& o, const Plot& plot, double ox, double W, double H, bool legend) {
  const double L = 70, R = legend ? 150 : 15, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  double x0, x1, y0, y1;
  limits(plot, true, x0, x1);
  limits(plot, false, y0, y1);
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

  o << "<g transform=\"translate(" << ox << " 0)\">\n"
    << "<text x=\"" << L + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
    << "</text>\n";
  const double xs = tick_step(x1 - x0, pw > 300 ? 8 : 4), ys = tick_step(y1 - y0, 6);
  for (double v = std::ceil(x0 / xs - 1e-9) * xs; v <= x1 + 1e-9 * xs; v += xs) {
    const double px = sx(v);
    o << "<line x1=\"" << fixed(px, 2) << "\" y1=\"" << T << "\" x2=\"" << fixed(px, 2) << "\" y2=\"" << T + ph
      << "\" stroke=\"#e4e4e4\"/>\n"
      << "<text x=\"" << fixed(px, 2) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">"
      << sig(std::abs(v) < 1e-12 * xs ? 0.0 : v) << "</text>\n";
  }
  for (double v = std::ceil(y0 / ys - 1e-9) * ys; v <= y1 + 1e-9 * ys; v += ys) {
    const double py = sy(v);
    o << "<line x1=\"" << L << "\" y1=\"" << fixed(py, 2) << "\" x2=\"" << L + pw << "\" y2=\"" << fixed(py, 2)
      << "\" stroke=\"#e4e4e4\"/>\n"
      << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py + 4, 2) << "\" text-anchor=\"end\">"
      << sig(std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">" << escape(plot.x_label)
    << "</text>\n"
    << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << T + ph / 2
    << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* color = kPalette[(s.color >= 0 ? static_cast<std::size_t>(s.color) : i) % std::size(kPalette)];
    if (s.markers) {
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        o << "<circle cx=\"" << fixed(sx(s.x[k]), 2) << "\" cy=\"" << fixed(sy(s.y[k]), 2)
          << "\" r=\"1.3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
      if (s.dashed) o << " stroke-dasharray=\"5,3\"";
      o << " points=\"";
      bool first = true;
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        o << (first ? "" : " ") << fixed(sx(s.x[k]), 2) << ',' << fixed(sy(s.y[k]), 2);
        first = false;
      }
      o << "\"/>\n";
    }
    if (!legend) continue;
    const double ly = T + 10 + 16.0 * i;
    o << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "")
      << "/>\n<text x=\"" << L + pw + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</g>\n";
}

}  // namespace

std::string render_svg(const Plot& plot) {
  constexpr double W = 640, H = 440;
  std::ostringstream o;
  open_svg(o, W, H);
  draw_panel(o, plot, 0.0, W, H, true);
  o << "</svg>\n";
  return o.str();
}

std::string mtf_svg(const std::vector<MtfSet>& curves) {
  auto plot = make_plot("Modulation transfer function", "Spatial frequency (cycles/mm)", "Modulus");
  plot.y_min = 0.0;
  plot.y_max = 1.0;
  plot.x_min = 0.0;
  for (const auto& c : curves) {
    const std::string f = sig(c.field_deg) + " deg";
    plot.series.push_back({f + " T", c.curve.frequency, c.curve.tangential, false, false});
    plot.series.push_back({f + " S", c.curve.frequency, c.curve.sagittal, true, false});
  }
  if (!curves.empty()) {
    Series dl{"diffraction limit", curves.front().curve.frequency, {}, true, false};
    for (double f : dl.x) dl.y.push_back(diffraction_limited_mtf(f / curves.front().curve.cutoff));
    plot.series.push_back(std::move(dl));
  }
  return render_svg(plot);
}

std::string opd_svg(const OpdFan& fan) {
  auto plot = make_plot("Optical path difference", "Normalized pupil coordinate", "OPD (waves)");
  plot.x_min = -1.0;
  plot.x_max = 1.0;
  for (const auto& f : fan.fields) {
    Series t{sig(f.field_deg) + " deg T", {}, {}, false, false};
    Series s{sig(f.field_deg) + " deg S", {}, {}, true, false};
    for (const auto& p : f.tangential) t.x.push_back(p.p), t.y.push_back(p.opd_waves);
    for (const auto& p : f.sagittal) s.x.push_back(p.p), s.y.push_back(p.opd_waves);
    plot.series.push_back(std::move(t));
    plot.series.push_back(std::move(s));
  }
  return render_svg(plot);
}

std::string field_svg(const FieldScan& scan) {
  auto plot = make_plot("Field curvature", "Focus shift from image plane (mm)", "Field (deg)");
  Series t{"tangential", {}, {}};
  Series s{"sagittal", {}, {}};
  s.dashed = true;
  for (const auto& p : scan.points) {
    t.x.push_back(p.tangential_shift_mm), t.y.push_back(p.field_deg);
    s.x.push_back(p.sagittal_shift_mm), s.y.push_back(p.field_deg);
  }
  plot.series = {std::move(t), std::move(s)};
  return render_svg(plot);
}

std::string distortion_svg(const FieldScan& scan) {
  auto plot = make_plot("Distortion", "Distortion (%)", "Field (deg)");
  Series d{"distortion", {}, {}};
  for (const auto& p : scan.points) d.x.push_back(p.distortion_percent), d.y.push_back(p.field_deg);
  plot.series = {std::move(d)};
  return render_svg(plot);
}

std::string spot_svg(const SpotReport& spots) {
  // One panel per field on a shared scale, colored by wavelength.
  std::vector<double> fields;
  for (const auto& e : spots.entries)
    if (fields.empty() || fields.back() != e.field_deg) fields.push_back(e.field_deg);
  double extent = 0.0;
  for (const auto& e : spots.entries)
    for (const auto& h : e.hits)
      extent = std::max({extent, std::abs(h.x - e.chief.x) * 1e3, std::abs(h.y - e.chief.y) * 1e3});
  extent = extent > 0.0 ? extent * 1.05 : 1.0;

  constexpr double panel = 330, H = 380, legend_w = 150;
  const double W = panel * static_cast<double>(fields.size()) + legend_w;
  std::ostringstream o;
  open_svg(o, W, H);
  std::vector<double> wavelengths;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    auto plot = make_plot(sig(fields[f]) + " deg", "x (um)", "y (um)");
    plot.x_min = plot.y_min = -extent;
    plot.x_max = plot.y_max = extent;
    int color = 0;
    for (const auto& e : spots.entries) {
      if (e.field_deg != fields[f]) continue;
      Series s{sig(e.wavelength_um) + " um", {}, {}};
      s.markers = true;
      s.color = color++;
      for (const auto& h : e.hits) {
        s.x.push_back((h.x - e.chief.x) * 1e3);
        s.y.push_back((h.y - e.chief.y) * 1e3);
      }
      if (f == 0) wavelengths.push_back(e.wavelength_um);
      plot.series.push_back(std::move(s));
    }
    draw_panel(o, plot, panel * static_cast<double>(f), panel, H, false);
  }
  for (std::size_t i = 0; i < wavelengths.size(); ++i) {
    const double x = W - legend_w + 10, y = 50 + 16.0 * i;
    o << "<circle cx=\"" << x + 10 << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << kPalette[i % std::size(kPalette)]
      << "\"/>\n<text x=\"" << x + 20 << "\" y=\"" << y + 4 << "\">" << sig(wavelengths[i]) << " um</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string psf_svg(const Psf& psf, int half) {
  const int c = psf.size / 2;
  if (half <= 0 || half > c) half = c;
  const int cells = 2 * half + 1;
  constexpr double side = 400.0, margin = 40.0;
  const double cell = side / cells;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << side + 2 * margin << "\" height=\""
    << side + 2 * margin << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"black\"/>\n"
    << "<text x=\"" << margin << "\" y=\"24\" fill=\"white\">PSF, Strehl " << fixed(psf.strehl, 4) << ", "
    << fixed(cells * psf.pixel_um, 2) << " um field</text>\n";
  for (int r = 0; r < cells; ++r)
    for (int col = 0; col < cells; ++col) {
      const int rr = c - half + r, cc = c - half + col;
      if (rr >= psf.size || cc >= psf.size) continue;
      const double v = psf.intensity[static_cast<std::size_t>(rr) * psf.size + cc];
      const int g = static_cast<int>(std::lround(255.0 * std::sqrt(std::clamp(v, 0.0, 1.0))));
      if (g == 0) continue;
      // rows run bottom-up so +y is up
      o << "<rect x=\"" << fixed(margin + col * cell, 2) << "\" y=\"" << fixed(margin + (cells - 1 - r) * cell, 2)
        << "\" width=\"" << fixed(cell + 0.05, 2) << "\" height=\"" << fixed(cell + 0.05, 2) << "\" fill=\"rgb("
        << g << ',' << g << ',' << g << ")\"/>\n";
    }
  o << "</svg>\n";
  return o.str();
}

}  // namespace seqtrace::report
