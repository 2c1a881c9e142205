// Acceptance gate. Prints one PASS/FAIL line per criterion (with the measured
// numbers underneath) and exits non-zero if any selected criterion fails.
//
//   acceptance            run all criteria
//   acceptance 3 5        run only criteria 3 and 5

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqtrace/cli.hpp"
#include "seqtrace/diffraction.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/field_scan.hpp"
#include "seqtrace/image.hpp"
#include "seqtrace/lens_file.hpp"
#include "seqtrace/merit.hpp"
#include "seqtrace/numfmt.hpp"
#include "seqtrace/optimize.hpp"
#include "seqtrace/paraxial.hpp"
#include "seqtrace/seidel.hpp"
#include "seqtrace/spot.hpp"
#include "seqtrace/wavefront.hpp"
#include "support.hpp"

using namespace seqtrace;
using test::node;
namespace fs = std::filesystem;

namespace {

constexpr double kLambda = 0.58756;

struct Check {
  std::string what;
  bool pass;
  std::string measured;
};

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<Check>()> run;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

LensSystem relay() { return load_lens(test::data_path("reference_relay.lens")); }

ErrorKind error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::invalid_argument;
}

// 1 ------------------------------------------------------------------------
std::vector<Check> analytic_mtf() {
  const double fno = 9.5 / 3.0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = mtf_from_psf(psf_from_pupil(ideal_pupil(64), 4, kLambda, fno));
  const double secs = seconds_since(t0);
  double sq = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < curve.frequency.size(); ++i) {
    const double nu = curve.frequency[i] / curve.cutoff;
    if (nu > 1.0 + 1e-12) continue;
    for (double m : {curve.tangential[i], curve.sagittal[i]}) {
      const double d = m - diffraction_limited_mtf(nu);
      sq += d * d;
      ++n;
    }
  }
  const double rms = std::sqrt(sq / n);
  return {{"RMS error vs (2/pi)(acos v - v sqrt(1-v^2)) < 0.005", rms < 0.005, num(rms)},
          {"cutoff = 537 +/- 2 cycles/mm", std::abs(curve.cutoff - 537.0) <= 2.0, num(curve.cutoff)},
          {"runtime < 1 s at 64x64 / pad 4", secs < 1.0, num(secs, 3) + " s"}};
}

// 2 ------------------------------------------------------------------------
std::vector<Check> paraxial_oracles() {
  const auto thick = test::plano_convex(50.0, 6.0, 1.5, 90.0);
  const auto g = test::constant_glass(1.5);
  const auto thin = test::make_system({node(Profile::sphere(50.0), 0.0, g), node(Profile::sphere(-50.0), 50.0),
                                       test::image_plane()});
  const auto plate = test::make_system({node(Profile::plano(), 5.0, g), node(Profile::plano(), 10.0), test::image_plane()});
  const double e1 = system_summary(thick).effl, e2 = system_summary(thin).effl;
  const bool afocal = error_kind([&] { system_summary(plate); }) == ErrorKind::afocal_system;
  return {{"thick plano-convex R=50 n=1.5: EFFL 100 to 1e-9 rel", rel(e1, 100.0) < 1e-9, num(e1, 17)},
          {"thin biconvex +/-50 n=1.5: EFFL 50 to 1e-9 rel", rel(e2, 50.0) < 1e-9, num(e2, 17)},
          {"plane-parallel plate -> AfocalSystem", afocal, afocal ? "AfocalSystem" : "no error"}};
}

// 3 ------------------------------------------------------------------------
std::vector<Check> snell_and_reversibility() {
  const auto sys = test::random_six_surface(2024);
  const auto media = sys.media(kLambda);
  test::Uniform u(99);
  double worst = 0.0;
  std::size_t completed = 0, surfaces = 0;
  const int kRays = 100000;
  for (int i = 0; i < kRays; ++i) {
    const Ray ray({u(-3.0, 3.0), u(-3.0, 3.0), -5.0}, {u(-0.05, 0.05), u(-0.05, 0.05), 1.0}, kLambda);
    const auto r = trace_ray(sys, ray, media);
    if (!r.completed()) continue;
    ++completed;
    surfaces += r.records.size();
    const auto res = test::residuals(ray, r);
    worst = std::max({worst, res.snell_angle, res.snell_vector});
  }

  const auto back = test::reversed(sys, 5.0);
  const double z_img = sys.vertex_z(sys.image_index());
  double rev_worst = 0.0;
  int reversed_rays = 0;
  for (int i = 0; i < 2000; ++i) {
    const Ray ray({u(-2, 2), u(-2, 2), -5.0}, {u(-0.03, 0.03), u(-0.03, 0.03), 1.0}, kLambda);
    const auto fwd = trace_ray(sys, ray);
    if (!fwd.completed()) continue;
    const auto& end = fwd.records.back();
    const Vec3 d{-end.direction.x, -end.direction.y, end.direction.z};
    const Vec3 p{end.point.x, end.point.y, z_img - end.point.z};
    const auto rev = trace_ray(back, Ray(p - d, d, kLambda));
    if (!rev.completed()) {
      rev_worst = HUGE_VAL;
      continue;
    }
    const auto& fin = rev.records.back();
    rev_worst = std::max({rev_worst, std::abs(fin.point.x - ray.origin().x), std::abs(fin.point.y - ray.origin().y),
                          std::abs(fin.direction.x + ray.direction().x), std::abs(fin.direction.y + ray.direction().y)});
    ++reversed_rays;
  }
  return {{"10^5 random rays launched", completed > kRays / 2,
           std::to_string(completed) + " completed, " + std::to_string(surfaces) + " surface crossings"},
          {"max |n1 sin t1 - n2 sin t2| < 1e-12", worst < 1e-12, num(worst, 3)},
          {"reversibility < 1e-9 mm / rad", rev_worst < 1e-9 && reversed_rays > 1000,
           num(rev_worst, 3) + " over " + std::to_string(reversed_rays) + " rays"}};
}

// 4 ------------------------------------------------------------------------
std::vector<Check> seidel_consistency() {
  std::vector<Check> out;
  const double t = 25.0;
  const auto concentric = test::make_system({node(Profile::plano(), t, glass::Material::air(), kUnbounded, true),
                                             node(Profile::sphere(-t), 30.0, test::constant_glass(1.7)),
                                             test::image_plane()});
  const auto zero = seidel_table_from_rays(concentric, {0.0, 0.08}, {0.0, 0.05}, kLambda);
  double largest = 0.0;
  for (const auto& row : zero.rows)
    for (double v : row.length) largest = std::max(largest, std::abs(v));
  out.push_back({"concentric surface: all five rows zero", largest < 1e-15, num(largest, 3)});

  double sum_err = 0.0;
  for (const auto& sys : {relay(), test::random_six_surface(5).with_fields({0.0, 3.0})}) {
    const auto table = seidel_table(sys);
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0, scale = 0.0;
      for (const auto& row : table.rows) {
        s += row.length[j];
        scale += std::abs(row.length[j]);
      }
      sum_err = std::max(sum_err, std::abs(table.sum.length[j] - s) / scale);
    }
  }
  out.push_back({"SUM row = column sums to 1e-12 rel", sum_err <= 1e-12, num(sum_err, 3)});

  const auto r = relay();
  for (double theta : {0.2, 0.1}) {
    const double a = field_point(r, theta).distortion_percent;
    const double b = field_point(r, theta / 2).distortion_percent;
    const double ratio = a / b;
    out.push_back({"relay distortion ratio D(" + num(theta) + ")/D(" + num(theta / 2) + ") = 4 +/- 10%",
                   std::abs(ratio / 4.0 - 1.0) <= 0.1, num(ratio)});
  }
  return out;
}

// 5 ------------------------------------------------------------------------
std::vector<Check> relay_reproduction() {
  std::vector<Check> out;
  const auto r = relay();
  const auto s = system_summary(r);
  out.push_back({"EFFL = 9.5 +/- 0.1 mm", std::abs(s.effl - 9.5) <= 0.1, num(s.effl)});
  out.push_back({"TOTR <= 20 mm", s.totr <= 20.0, num(s.totr)});
  out.push_back({"EPD = 3.0 mm", r.entrance_pupil_diameter() == 3.0, num(r.entrance_pupil_diameter())});
  out.push_back({"fields {0, 0.6, 1.2} deg", r.fields() == std::vector<double>{0.0, 0.6, 1.2},
                 num(r.fields()[0]) + " " + num(r.fields()[1]) + " " + num(r.fields()[2])});

  const auto spots = spot_diagram(r);
  std::string rms_list;
  bool spot_ok = true;
  for (std::size_t f = 0; f < r.fields().size(); ++f) {
    rms_list += num(spots.polychromatic_rms_um[f], 3) + " ";
    spot_ok = spot_ok && spots.polychromatic_rms_um[f] < spots.airy_radius_um;
    for (const auto& e : spots.entries)
      if (e.field_deg == r.fields()[f]) spot_ok = spot_ok && e.rms_radius_um < spots.airy_radius_um;
  }
  out.push_back({"RMS spot < Airy radius (" + num(spots.airy_radius_um, 3) + " um) at every field, poly and mono",
                 spot_ok, "poly RMS um: " + rms_list});

  const auto scan = field_curves_distortion(r, 25);
  double dist = 0.0;
  for (const auto& p : scan.points) dist = std::max(dist, std::abs(p.distortion_percent));
  out.push_back({"max |distortion| <= 0.05 %", dist <= 0.05, num(dist, 4) + " %"});

  double opd = 0.0;
  bool all_valid = true;
  for (const auto& f : opd_fan(r, 41).fields)
    for (const auto* arm : {&f.tangential, &f.sagittal})
      for (const auto& p : *arm) {
        all_valid = all_valid && p.valid;
        if (p.valid) opd = std::max(opd, std::abs(p.opd_waves));
      }
  out.push_back({"|OPD| <= 0.1 waves", all_valid && opd <= 0.1, num(opd, 4) + " waves"});

  double at150 = HUGE_VAL, beyond350 = 0.0;
  for (double f : r.fields()) {
    const auto mono = mtf(r, f);
    const auto poly = polychromatic_mtf(r, f);
    for (const auto* c : {&mono, &poly}) {
      at150 = std::min({at150, mtf_at(c->frequency, c->tangential, 150.0), mtf_at(c->frequency, c->sagittal, 150.0)});
      for (std::size_t i = 0; i < c->frequency.size(); ++i)
        if (c->frequency[i] > 350.0) beyond350 = std::max({beyond350, c->tangential[i], c->sagittal[i]});
    }
  }
  out.push_back({"MTF >= 0.45 at 150 cycles/mm (min over fields, T/S, mono/poly)", at150 >= 0.45, num(at150, 3)});
  const double dl350 = diffraction_limited_mtf(350.0 * kLambda * 1e-3 * s.fno);
  out.push_back({"MTF < 0.05 beyond 350 cycles/mm", beyond350 < 0.05,
                 num(beyond350, 3) + " (diffraction limit at 350: " + num(dl350, 3) + ")"});

  const auto dir = fs::temp_directory_path() / "seqtrace_acceptance_report";
  fs::remove_all(dir);
  std::ostringstream sink;
  const auto t0 = std::chrono::steady_clock::now();
  const int code =
      run_cli(std::vector<std::string>{"report", test::data_path("reference_relay.lens").string(), "--out", dir.string()},
              sink, sink);
  const double secs = seconds_since(t0);
  out.push_back({"full report run < 10 s", code == 0 && secs < 10.0,
                 "exit " + std::to_string(code) + ", " + num(secs, 3) + " s"});
  return out;
}

// 6 ------------------------------------------------------------------------
std::vector<Check> optimizer_and_marechal() {
  std::vector<Check> out;
  const auto sys = test::plano_convex(60.0, 4.0, 1.5, 90.0);
  const std::vector<Operand> ops = {{OperandKind::effl, 100.0, 1.0, OperandMode::equals, 0}};
  const auto res = local_optimize(sys, ops, parse_variables("C1", sys), 25);
  const double radius = res.system.surface(0).profile.radius();
  bool monotone = true;
  for (std::size_t i = 1; i < res.mf_trace.size(); ++i) monotone = monotone && res.mf_trace[i] <= res.mf_trace[i - 1];
  out.push_back({"singlet EFFL target: R = 50 +/- 1e-6 mm", std::abs(radius - 50.0) <= 1e-6, num(radius, 12)});
  out.push_back({"converged in <= 25 iterations", res.iterations <= 25, std::to_string(res.iterations)});
  out.push_back({"MF trace non-increasing", monotone, std::to_string(res.mf_trace.size()) + " entries"});

  // Random tilt-free low-order wavefront scaled to an RMS of lambda/14.
  const int n = 64;
  double worst = 0.0;
  std::string values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    test::Uniform u(seed);
    auto pupil = ideal_pupil(n);
    double c[8];
    for (double& v : c) v = u(-1.0, 1.0);
    double sum = 0.0, sum2 = 0.0, cells = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n * 2.0 - 1.0, y = (j + 0.5) / n * 2.0 - 1.0, r2 = x * x + y * y;
        const std::size_t k = static_cast<std::size_t>(j) * n + i;
        const double w = c[0] * (2 * r2 - 1) + c[1] * (x * x - y * y) + c[2] * 2 * x * y + c[3] * (3 * r2 - 2) * x +
                         c[4] * (3 * r2 - 2) * y + c[5] * (x * x * x - 3 * x * y * y) +
                         c[6] * (3 * x * x * y - y * y * y) + c[7] * (6 * r2 * r2 - 6 * r2 + 1);
        pupil.opd_waves[k] = w;
        if (pupil.amplitude[k] > 0.0) {
          sum += w;
          sum2 += w * w;
          cells += 1.0;
        }
      }
    const double mean = sum / cells, sigma = std::sqrt(sum2 / cells - mean * mean);
    for (double& w : pupil.opd_waves) w = (w - mean) / sigma / 14.0;
    const double strehl = psf_from_pupil(pupil, 4, kLambda, 9.5 / 3.0).strehl;
    worst = std::max(worst, std::abs(strehl - 0.8));
    values += num(strehl, 4) + " ";
  }
  out.push_back({"Strehl at sigma = lambda/14 is 0.8 +/- 0.05 (5 random wavefronts)", worst <= 0.05, values});
  return out;
}

// 7 ------------------------------------------------------------------------
std::vector<Check> hammer() {
  std::vector<Check> out;
  const auto r = relay();
  const auto ops = load_merit(test::data_path("relay.merit"));
  const auto cat = glass::load_catalog(test::data_path("glass/relay_glasses.cat"));
  HammerOptions opt;
  opt.budget = 20;
  opt.seed = 20240501;
  const auto a = hammer_optimize(r, ops, default_variables(r), cat, opt);
  const auto b = hammer_optimize(r, ops, default_variables(r), cat, opt);

  bool same = a.system == b.system && a.final_mf == b.final_mf && a.history.size() == b.history.size();
  for (std::size_t i = 0; same && i < a.history.size(); ++i)
    same = a.history[i].move == b.history[i].move && a.history[i].candidate_mf == b.history[i].candidate_mf &&
           a.history[i].incumbent_mf == b.history[i].incumbent_mf;
  same = same && format_lens(a.system) == format_lens(b.system);

  bool members = true;
  std::string glasses;
  for (const auto& s : a.system.surfaces())
    if (!s.material_after.is_air()) {
      members = members && cat.find(s.material_after.name()) != nullptr;
      glasses += s.material_after.name() + " ";
    }
  out.push_back({"catalog holds the ten substitution glasses", cat.size() == 10, std::to_string(cat.size())});
  out.push_back({"final MF <= initial MF", a.final_mf <= a.initial_mf,
                 num(a.initial_mf, 9) + " -> " + num(a.final_mf, 9)});
  out.push_back({"two runs bit-identical (system, MF, history)", same, std::to_string(a.history.size()) + " moves"});
  out.push_back({"final materials are catalog members", members, glasses});
  out.push_back({"relay merit file reaches MF < 0.05", a.final_mf < 0.05, num(a.final_mf, 9)});
  return out;
}

// 8 ------------------------------------------------------------------------
std::vector<Check> image_simulation() {
  std::vector<Check> out;
  const auto r = relay();
  const auto src = read_pgm(test::data_path("f_target.pgm"));
  ImageSimOptions opt;
  opt.out_size = 512;
  const auto geo = simulate_image(r, src, opt);
  const std::string eff = numfmt::fixed(geo.efficiency_percent, 2);
  out.push_back({"geometric efficiency = 100.00 %", eff == "100.00",
                 eff + " (" + std::to_string(geo.arrived) + "/" + std::to_string(geo.launched) + ")"});

  const int s = 64;
  GrayImage delta{s, s, std::vector<double>(s * s, 0.0)};
  delta.pixels[(s / 2) * s + s / 2] = 1.0;
  ImageSimOptions dopt;
  dopt.mode = ImageMode::diffraction;
  dopt.out_size = s;
  const auto sim = simulate_image(r, delta, dopt);
  const int h = sim.kernel_half, k = 2 * h + 1;
  const double kmax = *std::max_element(sim.kernel.begin(), sim.kernel.end());
  double err = 0.0;
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const int i = x - s / 2 + h, j = y - s / 2 + h;
      const double expect = (i >= 0 && j >= 0 && i < k && j < k) ? sim.kernel[j * k + i] : 0.0;
      err = std::max(err, std::abs(sim.raw[y * s + x] - expect) / kmax);
    }
  out.push_back({"delta source reproduces the PSF kernel to 1e-9 rel", err <= 1e-9 && h > 0, num(err, 3)});
  return out;
}

// 9 ------------------------------------------------------------------------
std::vector<Check> round_trips() {
  const auto r = relay();
  const std::string text = format_lens(r);
  const bool identity = parse_lens(text) == r && format_lens(parse_lens(text)) == text;
  const auto dir = fs::temp_directory_path() / "seqtrace_acceptance_roundtrip";
  fs::create_directories(dir);
  write_lens(r, dir / "a.lens");
  write_lens(r, dir / "b.lens");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const bool bytes = slurp(dir / "a.lens") == slurp(dir / "b.lens") && !slurp(dir / "a.lens").empty();

  const auto& cat = glass::default_catalog();
  const auto again = glass::parse_catalog(glass::format_catalog(cat));
  bool coeffs = again.size() == cat.size();
  for (std::size_t i = 0; coeffs && i < cat.size(); ++i)
    coeffs = cat.entries()[i].coefficients() == again.entries()[i].coefficients() &&
             cat.entries()[i].model() == again.entries()[i].model();
  return {{"parse(write(relay)) == relay", identity, std::to_string(text.size()) + " bytes"},
          {"two writes byte-identical", bytes, ""},
          {"catalog round trip keeps every coefficient bit for bit", coeffs, std::to_string(cat.size()) + " glasses"}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "analytic diffraction MTF oracle", analytic_mtf},
      {2, "paraxial oracles", paraxial_oracles},
      {3, "Snell invariant and reversibility", snell_and_reversibility},
      {4, "Seidel consistency", seidel_consistency},
      {5, "reference relay reproduction", relay_reproduction},
      {6, "local optimizer and Strehl", optimizer_and_marechal},
      {7, "hammer glass search", hammer},
      {8, "image simulation", image_simulation},
      {9, "round trips", round_trips},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  bool ok = true;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    std::vector<Check> checks;
    try {
      checks = c.run();
    } catch (const std::exception& e) {
      checks = {{"ran without error", false, e.what()}};
    }
    bool pass = true;
    for (const auto& k : checks) pass = pass && k.pass;
    ok = ok && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << '\n';
    for (const auto& k : checks)
      std::cout << "        [" << (k.pass ? "ok  " : "FAIL") << "] " << k.what
                << (k.measured.empty() ? "" : "  -> " + k.measured) << '\n';
  }
  return ok ? 0 : 1;
}
