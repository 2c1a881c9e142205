#include "seqtrace/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqtrace/aim.hpp"
#include "seqtrace/diffraction.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/field_scan.hpp"
#include "seqtrace/glass.hpp"
#include "seqtrace/image.hpp"
#include "seqtrace/lens_file.hpp"
#include "seqtrace/merit.hpp"
#include "seqtrace/numfmt.hpp"
#include "seqtrace/optimize.hpp"
#include "seqtrace/paraxial.hpp"
#include "seqtrace/report.hpp"
#include "seqtrace/seidel.hpp"
#include "seqtrace/spot.hpp"
#include "seqtrace/wavefront.hpp"

namespace seqtrace {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string lens;
  std::string catalog;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

struct AnalyzeArgs {
  std::string kind;
  std::vector<double> fields;
  int samples = 21;
  int grid = 64;
  int pad = 4;
  int rings = 10;
  bool mono = false;
};

struct TraceArgs {
  double field = 0.0;
  double px = 0.0;
  double py = 0.0;
  double wavelength = 0.0;
};

struct ImageArgs {
  std::string input;
  std::string mode = "geometric";
  int size = 512;
  int rays = 0;
};

struct OptimizeArgs {
  std::string kind;
  std::string merit;
  std::string vary;
  int iterations = 50;
  int budget = 20;
  int nearest = 5;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ray_misses_surface:
    case ErrorKind::vignetted:
    case ErrorKind::total_internal_reflection:
    case ErrorKind::undefined_abbe:
    case ErrorKind::afocal_system:
    case ErrorKind::aiming_failure:
    case ErrorKind::no_unvignetted_rays:
    case ErrorKind::grid_too_coarse:
      return kExitAnalysis;
    default:
      return kExitUsage;
  }
}

// Lens materials resolve against --catalog first, then the built-in catalog.
glass::GlassCatalog lens_catalog(const std::string& path) {
  if (path.empty()) return glass::default_catalog();
  auto cat = glass::load_catalog(path);
  for (const auto& m : glass::default_catalog().entries())
    if (!cat.find(m.name())) cat.add(m);
  return cat;
}

LensSystem load(const Common& c) { return load_lens(c.lens, lens_catalog(c.catalog)); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io_failure, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io_failure, "cannot create directory " + dir.string() + ": " + ec.message());
}

// Writes into --out/<name>, or to stdout when --out is empty.
void emit(const Common& c, std::ostream& out, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  make_dir(c.out);
  write_text(fs::path(c.out) / name, text);
  out << "wrote " << (fs::path(c.out) / name).string() << '\n';
}

std::vector<report::MtfSet> mtf_curves(const LensSystem& s, int grid, int pad, bool mono) {
  std::vector<report::MtfSet> curves;
  for (double f : s.fields())
    curves.push_back({f, mono ? mtf(s, f, grid, pad) : polychromatic_mtf(s, f, grid, pad)});
  return curves;
}

int cmd_trace(const Common& c, const TraceArgs& a, std::ostream& out, std::ostream& err) {
  const auto sys = load(c);
  const double wl = a.wavelength > 0 ? a.wavelength : sys.primary_wavelength();
  const auto frame = aim_chief_ray(sys, a.field, sys.primary_wavelength());
  const auto result = trace_ray(sys, frame.ray(a.px, a.py, wl));
  emit(c, out, "trace.csv", report::trace_csv(result));
  if (!result.completed()) {
    err << "ray " << to_string(result.status) << " at surface " << result.failed_surface + 1 << '\n';
    return kExitAnalysis;
  }
  if (!c.out.empty()) out << "total OPL " << numfmt::exact(result.total_opl) << " mm\n";
  return kExitOk;
}

int cmd_report(const Common& c, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto sys = load(c);
  const auto summary = system_summary(sys);
  const auto spots = spot_diagram(sys);
  const auto curves = mtf_curves(sys, 64, 4, false);
  const auto fan = opd_fan(sys, 21);
  const auto seidel = seidel_table(sys);
  const auto scan = field_curves_distortion(sys, 21);
  const auto psf = psf_and_strehl(sys, 0.0, 64, 4);

  const fs::path dir = c.out.empty() ? fs::path("report") : fs::path(c.out);
  make_dir(dir);
  write_text(dir / "summary.csv", report::summary_csv(sys, summary));
  write_text(dir / "spot.csv", report::spot_csv(spots));
  write_text(dir / "spot_points.csv", report::spot_points_csv(spots));
  write_text(dir / "spot.svg", report::spot_svg(spots));
  write_text(dir / "mtf.csv", report::mtf_csv(curves));
  write_text(dir / "mtf.svg", report::mtf_svg(curves));
  write_text(dir / "opd.csv", report::opd_csv(fan));
  write_text(dir / "opd.svg", report::opd_svg(fan));
  write_text(dir / "seidel.csv", report::seidel_csv(seidel));
  write_text(dir / "field.csv", report::field_csv(scan));
  write_text(dir / "field.svg", report::field_svg(scan));
  write_text(dir / "distortion.svg", report::distortion_svg(scan));
  write_text(dir / "psf.csv", report::psf_csv(psf, 32));
  write_text(dir / "psf.svg", report::psf_svg(psf, 32));

  using numfmt::fixed;
  out << "EFFL " << fixed(summary.effl, 4) << " mm  TOTR " << fixed(summary.totr, 4) << " mm  F/"
      << fixed(summary.fno, 4) << "  BFL " << fixed(summary.bfl, 4) << " mm\n";
  out << "Airy radius " << fixed(spots.airy_radius_um, 3) << " um\n";
  for (std::size_t i = 0; i < sys.fields().size(); ++i) {
    double opd_max = 0.0;
    for (const auto& s : fan.fields[i].tangential) opd_max = std::max(opd_max, std::abs(s.opd_waves));
    for (const auto& s : fan.fields[i].sagittal) opd_max = std::max(opd_max, std::abs(s.opd_waves));
    const auto& m = curves[i].curve;
    out << "field " << fixed(sys.fields()[i], 2) << " deg: RMS spot " << fixed(spots.polychromatic_rms_um[i], 3)
        << " um, max |OPD| " << fixed(opd_max, 4) << " waves, MTF@150 T " << fixed(mtf_at(m.frequency, m.tangential, 150), 3)
        << " S " << fixed(mtf_at(m.frequency, m.sagittal, 150), 3) << '\n';
  }
  double dist = 0.0;
  for (const auto& p : scan.points) dist = std::max(dist, std::abs(p.distortion_percent));
  out << "max |distortion| " << fixed(dist, 5) << " %  Strehl(0) " << fixed(psf.strehl, 4) << '\n';
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "report written to " << dir.string() << " in " << fixed(secs, 2) << " s\n";
  return kExitOk;
}

int cmd_analyze(const Common& c, const AnalyzeArgs& a, std::ostream& out) {
  auto sys = load(c);
  if (!a.fields.empty()) sys = sys.with_fields(a.fields);
  const bool svg = c.format == "svg";
  const std::string ext = svg ? ".svg" : ".csv";
  if (a.kind == "spot") {
    const auto spots = spot_diagram(sys, PupilPattern::hexapolar, a.rings);
    emit(c, out, "spot" + ext, svg ? report::spot_svg(spots) : report::spot_csv(spots));
  } else if (a.kind == "mtf") {
    const auto curves = mtf_curves(sys, a.grid, a.pad, a.mono);
    emit(c, out, "mtf" + ext, svg ? report::mtf_svg(curves) : report::mtf_csv(curves));
  } else if (a.kind == "psf") {
    const double field = a.fields.empty() ? sys.fields().front() : a.fields.front();
    const auto psf = psf_and_strehl(sys, field, a.grid, a.pad);
    emit(c, out, "psf" + ext, svg ? report::psf_svg(psf, 32) : report::psf_csv(psf, 0));
    if (!c.out.empty()) out << "strehl " << numfmt::fixed(psf.strehl, 6) << '\n';
  } else if (a.kind == "opd") {
    const auto fan = opd_fan(sys, a.samples);
    emit(c, out, "opd" + ext, svg ? report::opd_svg(fan) : report::opd_csv(fan));
  } else if (a.kind == "field") {
    const auto scan = field_curves_distortion(sys, a.samples);
    emit(c, out, "field" + ext, svg ? report::field_svg(scan) : report::field_csv(scan));
    if (svg && !c.out.empty()) emit(c, out, "distortion.svg", report::distortion_svg(scan));
  } else {
    if (svg) throw Error(ErrorKind::invalid_argument, "seidel has no SVG view; use --format csv");
    emit(c, out, "seidel.csv", report::seidel_csv(seidel_table(sys)));
  }
  return kExitOk;
}

int cmd_image(const Common& c, const ImageArgs& a, std::ostream& out) {
  const auto sys = load(c);
  const auto source = read_pgm(a.input);
  ImageSimOptions opt;
  opt.mode = a.mode == "diffraction" ? ImageMode::diffraction : ImageMode::geometric;
  opt.out_size = a.size;
  opt.rays_per_pixel = a.rays;
  opt.seed = c.seed;
  const auto sim = simulate_image(sys, source, opt);

  fs::path path = c.out.empty() ? fs::path("simulated.pgm") : fs::path(c.out);
  if (path.extension() != ".pgm") {
    make_dir(path);
    path /= "simulated.pgm";
  } else if (path.has_parent_path()) {
    make_dir(path.parent_path());
  }
  write_pgm(sim.image, path);
  out << "wrote " << path.string() << '\n';
  out << "pixel " << numfmt::fixed(sim.pixel_um, 4) << " um\n";
  if (opt.mode == ImageMode::geometric)
    out << "rays launched " << sim.launched << " arrived " << sim.arrived << '\n';
  out << "efficiency " << numfmt::fixed(sim.efficiency_percent, 2) << '\n';
  return kExitOk;
}

int cmd_optimize(const Common& c, const OptimizeArgs& a, std::ostream& out) {
  const auto sys = load(c);
  const auto operands = load_merit(a.merit);
  const auto vars = a.vary.empty() ? default_variables(sys) : parse_variables(a.vary, sys);
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);

  LensSystem result = sys;
  std::string history;
  double initial = 0.0, final_mf = 0.0;
  if (a.kind == "local") {
    auto r = local_optimize(sys, operands, vars, a.iterations);
    initial = r.mf_trace.front();
    final_mf = r.mf_trace.back();
    history = report::local_history_csv(r);
    out << "iterations " << r.iterations << " (" << r.stop_reason << ")\n";
    result = std::move(r.system);
  } else {
    const auto pool = c.catalog.empty() ? glass::default_catalog() : glass::load_catalog(c.catalog);
    HammerOptions opt;
    opt.budget = a.budget;
    opt.seed = c.seed;
    opt.nearest = a.nearest;
    auto r = hammer_optimize(sys, operands, vars, pool, opt);
    initial = r.initial_mf;
    final_mf = r.final_mf;
    history = report::hammer_history_csv(r);
    result = std::move(r.system);
  }
  make_dir(dir);
  write_lens(result, dir / "optimized.lens");
  write_text(dir / "history.csv", history);
  const auto final_report = merit_value(result, operands);
  std::ostringstream breakdown;
  breakdown << "operand,field,target,weight,mode,value,deviation,contribution_percent\n";
  for (const auto& v : final_report.operands)
    breakdown << to_string(v.operand.kind) << ',' << v.operand.field + 1 << ',' << numfmt::exact(v.operand.target)
              << ',' << numfmt::exact(v.operand.weight) << ',' << to_string(v.operand.mode) << ','
              << numfmt::exact(v.value) << ',' << numfmt::exact(v.deviation) << ','
              << numfmt::exact(v.contribution_percent) << '\n';
  write_text(dir / "merit.csv", breakdown.str());
  out << "initial MF " << numfmt::general(initial, 9) << '\n';
  out << "final MF " << numfmt::general(final_mf, 9) << '\n';
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto& m = result.surface(i).material_after;
    if (!m.is_air()) out << "S" << i + 1 << ' ' << m.name() << '\n';
  }
  out << "wrote " << (dir / "optimized.lens").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential lens tracing, analysis and optimization", "seqtrace"};
  app.require_subcommand(1);

  Common common;
  TraceArgs trace_args;
  AnalyzeArgs analyze_args;
  ImageArgs image_args;
  OptimizeArgs opt_args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("lens", common.lens, "Lens prescription file")->required();
    sub->add_option("--catalog", common.catalog, "Glass catalog file");
    sub->add_option("--out", common.out, "Output directory (or .pgm path for image)");
  };

  auto* trace = app.add_subcommand("trace", "Trace one real ray and list every surface crossing");
  add_common(trace);
  trace->add_option("--field", trace_args.field, "Field angle, degrees");
  trace->add_option("--px", trace_args.px, "Normalized pupil x")->check(CLI::Range(-1.0, 1.0));
  trace->add_option("--py", trace_args.py, "Normalized pupil y")->check(CLI::Range(-1.0, 1.0));
  trace->add_option("--wavelength", trace_args.wavelength, "Wavelength, um (default: primary)");

  auto* rep = app.add_subcommand("report", "Paraxial summary plus every analysis as CSV and SVG");
  add_common(rep);

  auto* analyze = app.add_subcommand("analyze", "Run one analysis");
  analyze->add_option("kind", analyze_args.kind, "spot|mtf|psf|opd|field|seidel")
      ->required()
      ->check(CLI::IsMember({"spot", "mtf", "psf", "opd", "field", "seidel"}));
  add_common(analyze);
  analyze->add_option("--format", common.format, "csv|svg")->check(CLI::IsMember({"csv", "svg"}));
  analyze->add_option("--field", analyze_args.fields, "Field angles, degrees (default: system fields)");
  analyze->add_option("--samples", analyze_args.samples, "OPD fan / field scan samples")->check(CLI::Range(3, 10001));
  analyze->add_option("--grid", analyze_args.grid, "Pupil grid for PSF/MTF")->check(CLI::Range(8, 1024));
  analyze->add_option("--pad", analyze_args.pad, "Zero-padding factor for PSF/MTF")->check(CLI::Range(2, 16));
  analyze->add_option("--rings", analyze_args.rings, "Hexapolar rings for spot diagrams")->check(CLI::Range(1, 200));
  analyze->add_flag("--mono", analyze_args.mono, "MTF at the primary wavelength only");

  auto* image = app.add_subcommand("image", "Simulate the image of a PGM source");
  add_common(image);
  image->add_option("--input", image_args.input, "Source PGM")->required();
  image->add_option("--mode", image_args.mode, "geometric|diffraction")
      ->check(CLI::IsMember({"geometric", "diffraction"}));
  image->add_option("--size", image_args.size, "Output side length, pixels")->check(CLI::Range(8, 4096));
  image->add_option("--rays", image_args.rays, "Rays per pixel (0: automatic)")->check(CLI::NonNegativeNumber);
  image->add_option("--seed", common.seed, "Random seed");

  auto* optimize = app.add_subcommand("optimize", "Local damped least squares or hammer glass search");
  optimize->add_option("kind", opt_args.kind, "local|hammer")
      ->required()
      ->check(CLI::IsMember({"local", "hammer"}));
  add_common(optimize);
  optimize->add_option("--merit", opt_args.merit, "Merit file")->required();
  optimize->add_option("--vary", opt_args.vary, "Variables, e.g. \"C1 C2 T2:0.5:4 G1\"");
  optimize->add_option("--iterations", opt_args.iterations, "Local iterations")->check(CLI::Range(1, 100000));
  optimize->add_option("--budget", opt_args.budget, "Hammer iterations")->check(CLI::Range(0, 100000));
  optimize->add_option("--nearest", opt_args.nearest, "Hammer candidates per move")->check(CLI::Range(1, 1000));
  optimize->add_option("--seed", common.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (trace->parsed()) return cmd_trace(common, trace_args, out, err);
    if (rep->parsed()) return cmd_report(common, out);
    if (analyze->parsed()) return cmd_analyze(common, analyze_args, out);
    if (image->parsed()) return cmd_image(common, image_args, out);
    return cmd_optimize(common, opt_args, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"seqtrace"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace seqtrace
