#include "seqtrace/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "seqtrace/error.hpp"
#include "seqtrace/numfmt.hpp"

namespace seqtrace {

namespace {

constexpr double kRelativeStep = 1e-6;
constexpr double kAbsoluteStep = 1e-9;
constexpr double kInitialDamping = 1e-3;
constexpr double kMaxDamping = 1e16;
constexpr double kMfTolerance = 1e-12;
constexpr double kDegenerateColumn = 1e-14;

struct Evaluation {
  double mf;
  Eigen::VectorXd residual;  // sqrt(wᵢ/Σw)·dᵢ, so |r| = MF
  bool penalty;
};

Evaluation evaluate(const LensSystem& system, std::span<const Operand> operands) {
  const MeritReport report = merit_value(system, operands);
  Evaluation e{report.value, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(operands.size())),
               report.penalty};
  if (report.penalty) return e;
  double wsum = 0.0;
  for (const Operand& op : operands) wsum += op.weight;
  for (std::size_t i = 0; i < operands.size(); ++i)
    e.residual[static_cast<Eigen::Index>(i)] = std::sqrt(operands[i].weight / wsum) * report.operands[i].deviation;
  return e;
}

LensSystem apply(const LensSystem& base, const std::vector<Variable>& vars, const Eigen::VectorXd& x) {
  LensSystem s = base;
  for (std::size_t i = 0; i < vars.size(); ++i) s = with_variable(s, vars[i], x[static_cast<Eigen::Index>(i)]);
  return s;
}

double clamp_to(const Variable& v, double x) { return std::clamp(x, v.lower, v.upper); }

bool is_glass(const LensSystem& system, std::size_t i) {
  return i < system.image_index() && !system.surface(i).material_after.is_air();
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<Variable> VariableSet::continuous() const {
  std::vector<Variable> out;
  for (const Variable& v : entries)
    if (v.kind != VariableKind::material) out.push_back(v);
  return out;
}

std::vector<std::size_t> VariableSet::material_surfaces() const {
  std::vector<std::size_t> out;
  for (const Variable& v : entries)
    if (v.kind == VariableKind::material) out.push_back(v.surface);
  return out;
}

VariableSet parse_variables(std::string_view spec, const LensSystem& system) {
  std::string text(spec);
  std::replace(text.begin(), text.end(), ',', ' ');
  VariableSet set;
  for (std::string_view tok : numfmt::split_ws(text)) {
    std::string t = numfmt::upper(tok);
    // Optional bounds: C1:lower:upper, either side may be empty.
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool has_lower = false;
    if (const auto colon = t.find(':'); colon != std::string::npos) {
      const std::string bounds = t.substr(colon + 1);
      t.resize(colon);
      const auto second = bounds.find(':');
      const std::string lo = bounds.substr(0, second);
      const std::string hi = second == std::string::npos ? "" : bounds.substr(second + 1);
      if (!lo.empty()) {
        const auto v = numfmt::parse(lo);
        if (!v) throw Error(ErrorKind::invalid_argument, "bad lower bound `" + lo + "`");
        lower = *v;
        has_lower = true;
      }
      if (!hi.empty()) {
        const auto v = numfmt::parse(hi);
        if (!v) throw Error(ErrorKind::invalid_argument, "bad upper bound `" + hi + "`");
        upper = *v;
      }
      if (!(lower <= upper)) throw Error(ErrorKind::invalid_argument, "empty bounds for `" + t + "`");
    }
    if (t.size() < 2) throw Error(ErrorKind::invalid_argument, "bad variable token `" + t + "`");
    const auto num = numfmt::parse(std::string_view(t).substr(1));
    if (!num || *num < 1.0 || *num != std::floor(*num) || *num > 1e6)
      throw Error(ErrorKind::invalid_argument, "bad surface number in `" + t + "`");
    const std::size_t s = static_cast<std::size_t>(*num) - 1;
    if (s >= system.image_index())
      throw Error(ErrorKind::invalid_argument, "variable `" + t + "` does not name an optical surface");
    switch (t[0]) {
      case 'C': set.entries.push_back({VariableKind::curvature, s, lower, upper}); break;
      case 'T': set.entries.push_back({VariableKind::thickness, s, has_lower ? lower : 0.0, upper}); break;
      case 'G':
        if (!is_glass(system, s))
          throw Error(ErrorKind::invalid_argument, "variable `" + t + "` names an air space");
        set.entries.push_back({VariableKind::material, s});
        break;
      default: throw Error(ErrorKind::invalid_argument, "bad variable token `" + t + "`");
    }
  }
  return set;
}

VariableSet default_variables(const LensSystem& system) {
  VariableSet set;
  for (std::size_t i = 0; i < system.image_index(); ++i) {
    const bool air_before = i == 0 || system.surface(i - 1).material_after.is_air();
    const bool refracting = !(air_before && system.surface(i).material_after.is_air()) ||
                            system.surface(i).profile.kind() != ProfileKind::plano;
    if (refracting) set.entries.push_back({VariableKind::curvature, i});
  }
  for (std::size_t i = 0; i < system.image_index(); ++i)
    if (is_glass(system, i)) set.entries.push_back({VariableKind::material, i});
  return set;
}

double variable_value(const LensSystem& system, const Variable& v) {
  switch (v.kind) {
    case VariableKind::curvature: return system.surface(v.surface).profile.curvature();
    case VariableKind::thickness: return system.surface(v.surface).thickness;
    case VariableKind::material: break;
  }
  throw Error(ErrorKind::invalid_argument, "material variables have no numeric value");
}

LensSystem with_variable(const LensSystem& system, const Variable& v, double value) {
  switch (v.kind) {
    case VariableKind::curvature:
      return system.with_profile(
          v.surface, Profile::from_curvature(value, system.surface(v.surface).profile.conic_constant()));
    case VariableKind::thickness: return system.with_thickness(v.surface, value);
    case VariableKind::material: break;
  }
  throw Error(ErrorKind::invalid_argument, "material variables have no numeric value");
}

LocalResult local_optimize(const LensSystem& system, std::span<const Operand> operands,
                           const VariableSet& variables, int max_iterations) {
  const std::vector<Variable> vars = variables.continuous();
  if (vars.empty()) throw Error(ErrorKind::no_variables, "no continuous variables to optimize");
  const auto nv = static_cast<Eigen::Index>(vars.size());

  LocalResult result{system, {}, 0, false, "max-iterations"};
  Eigen::VectorXd x(nv);
  for (Eigen::Index i = 0; i < nv; ++i) x[i] = variable_value(system, vars[static_cast<std::size_t>(i)]);
  Evaluation cur = evaluate(system, operands);
  result.mf_trace.push_back(cur.mf);
  if (cur.penalty) {
    result.stop_reason = "penalty-start";
    return result;
  }
  double damping = kInitialDamping;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (cur.mf == 0.0) {
      result.stop_reason = "on-target";
      break;
    }
    // Forward-difference Jacobian of the weighted residuals.
    Eigen::MatrixXd jac(cur.residual.size(), nv);
    for (Eigen::Index j = 0; j < nv; ++j) {
      const Variable& v = vars[static_cast<std::size_t>(j)];
      double h = std::max(kRelativeStep * std::abs(x[j]), kAbsoluteStep);
      if (x[j] + h > v.upper) h = -h;
      Eigen::VectorXd xp = x;
      xp[j] += h;
      const Evaluation e = evaluate(apply(system, vars, xp), operands);
      jac.col(j) = e.penalty ? Eigen::VectorXd::Zero(cur.residual.size())
                             : Eigen::VectorXd((e.residual - cur.residual) / h);
    }
    if ((jac.colwise().norm().array() < kDegenerateColumn).all()) {
      result.jacobian_degenerate = true;
      result.stop_reason = "jacobian-degenerate";
      if (iter == 0) return result;
      break;
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * cur.residual;
    const double diag_floor = std::max(a.diagonal().maxCoeff() * 1e-12, 1e-300);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd m = a;
      for (Eigen::Index j = 0; j < nv; ++j) m(j, j) += damping * std::max(a(j, j), diag_floor);
      const Eigen::VectorXd step = m.ldlt().solve(-g);
      Eigen::VectorXd xt = x + step;
      for (Eigen::Index j = 0; j < nv; ++j) xt[j] = clamp_to(vars[static_cast<std::size_t>(j)], xt[j]);
      Evaluation trial{kMeritPenalty, {}, true};
      if (step.allFinite()) {
        try {
          trial = evaluate(apply(system, vars, xt), operands);
        } catch (const Error&) {
          // Invalid geometry (e.g. negative thickness) counts as a rejected step.
        }
      }
      if (!trial.penalty && trial.mf < cur.mf) {
        const double previous = cur.mf;
        x = xt;
        cur = std::move(trial);
        result.system = apply(system, vars, x);
        result.mf_trace.push_back(cur.mf);
        ++result.iterations;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        if (previous - cur.mf < kMfTolerance) {
          result.stop_reason = "converged";
          return result;
        }
      } else {
        damping *= 10.0;
        if (damping > kMaxDamping) {
          result.stop_reason = "damping-overflow";
          return result;
        }
      }
    }
  }
  return result;
}

HammerResult hammer_optimize(const LensSystem& system, std::span<const Operand> operands,
                             const VariableSet& variables, const glass::GlassCatalog& catalog,
                             const HammerOptions& options) {
  if (options.budget < 1) throw Error(ErrorKind::invalid_argument, "hammer budget must be >= 1");
  VariableSet continuous{variables.continuous()};
  std::vector<std::size_t> glass_surfaces = variables.material_surfaces();
  if (glass_surfaces.empty())
    for (std::size_t i = 0; i < system.image_index(); ++i)
      if (is_glass(system, i)) glass_surfaces.push_back(i);

  // Catalog spread for the normalized (n_d, V_d) distance.
  std::vector<glass::GlassPoint> points;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const glass::GlassPoint p = catalog.point(i);
    if (!std::isfinite(p.vd)) continue;
    points.push_back(p);
    usable.push_back(i);
  }
  auto spread = [&](auto get) {
    if (points.size() < 2) return 1.0;
    double m = 0.0;
    for (const auto& p : points) m += get(p);
    m /= points.size();
    double ss = 0.0;
    for (const auto& p : points) ss += (get(p) - m) * (get(p) - m);
    const double sd = std::sqrt(ss / points.size());
    return sd > 0.0 ? sd : 1.0;
  };
  const double sn = spread([](const glass::GlassPoint& p) { return p.nd; });
  const double sv = spread([](const glass::GlassPoint& p) { return p.vd; });

  std::mt19937_64 rng(options.seed);
  auto run_local = [&](const LensSystem& s, std::string& flags) -> std::pair<LensSystem, double> {
    if (continuous.entries.empty()) return {s, merit_value(s, operands).value};
    LocalResult r = local_optimize(s, operands, continuous, options.local_iterations);
    if (r.jacobian_degenerate) flags += "jacobian-degenerate;";
    if (r.mf_trace.back() >= kMeritPenalty) flags += "penalty;";
    return {std::move(r.system), r.mf_trace.back()};
  };

  HammerResult result{system, 0.0, 0.0, {}};
  result.initial_mf = merit_value(system, operands).value;
  double best = result.initial_mf;

  for (int it = 1; it <= options.budget; ++it) {
    bool substituted = false;
    if (!glass_surfaces.empty() && !usable.empty()) {
      const std::size_t surf = glass_surfaces[static_cast<std::size_t>(it - 1) % glass_surfaces.size()];
      const glass::Material& current = result.system.surface(surf).material_after;
      const double nd = current.refractive_index(glass::kLineD);
      double vd = 0.0;
      try {
        vd = glass::abbe_number(current);
      } catch (const Error&) {
      }
      std::vector<std::pair<double, std::size_t>> ranked;
      for (std::size_t k = 0; k < usable.size(); ++k) {
        const glass::Material& m = catalog.entries()[usable[k]];
        if (numfmt::upper(m.name()) == numfmt::upper(current.name())) continue;
        const double dn = (points[k].nd - nd) / sn, dv = (points[k].vd - vd) / sv;
        ranked.push_back({dn * dn + dv * dv, usable[k]});
      }
      std::stable_sort(ranked.begin(), ranked.end());
      if (ranked.size() > static_cast<std::size_t>(std::max(options.nearest, 0)))
        ranked.resize(static_cast<std::size_t>(std::max(options.nearest, 0)));
      // Candidates are evaluated in ascending catalog order so ties keep the lowest index.
      std::sort(ranked.begin(), ranked.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
      for (const auto& [dist, idx] : ranked) {
        const glass::Material& m = catalog.entries()[idx];
        std::string flags;
        auto [cand, mf] = run_local(result.system.with_material(surf, m), flags);
        if (mf < best) {
          best = mf;
          result.system = std::move(cand);
        }
        result.history.push_back({it, "substitute S" + std::to_string(surf + 1) + " " + m.name(), mf, best, flags});
        substituted = true;
      }
    }
    // With nothing to substitute the loop degenerates to restarts.
    if (!substituted || (options.restart_period > 0 && it % options.restart_period == 0)) {
      LensSystem p = result.system;
      for (const Variable& v : continuous.entries) {
        if (v.kind != VariableKind::curvature) continue;
        const double c = variable_value(p, v);
        p = with_variable(p, v, clamp_to(v, c * (1.0 + options.perturbation * (2.0 * uniform(rng) - 1.0))));
      }
      std::string flags;
      double mf = kMeritPenalty;
      LensSystem cand = p;
      try {
        std::tie(cand, mf) = run_local(p, flags);
      } catch (const Error& e) {
        flags += std::string("error:") + to_string(e.kind()) + ";";
      }
      if (mf < best) {
        best = mf;
        result.system = std::move(cand);
      }
      result.history.push_back({it, "restart", mf, best, flags});
    }
  }
  result.final_mf = best;
  return result;
}

}  // namespace seqtrace
