#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "seqtrace/error.hpp"
#include "seqtrace/lens_file.hpp"
#include "seqtrace/merit.hpp"
#include "seqtrace/optimize.hpp"
#include "seqtrace/paraxial.hpp"
#include "support.hpp"

using namespace seqtrace;

namespace {

LensSystem relay() { return load_lens(test::data_path("reference_relay.lens")); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_argument;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

const std::vector<Operand> kEffl100 = {{OperandKind::effl, 100.0, 1.0, OperandMode::equals, 0}};

}  // namespace

TEST_CASE("merit value is the weighted RMS of deviations") {
  const auto sys = test::plano_convex(50.0, 4.0, 1.5, 90.0);
  const auto s = system_summary(sys);
  std::vector<Operand> ops = {{OperandKind::effl, s.effl - 3.0, 1.0, OperandMode::equals, 0},
                              {OperandKind::totr, s.totr + 4.0, 1.0, OperandMode::equals, 0}};
  const auto report = merit_value(sys, ops);
  CHECK(std::abs(report.value - std::sqrt((9.0 + 16.0) / 2.0)) < 1e-12);
  CHECK(std::abs(report.value - 3.53553) < 1e-5);
  REQUIRE(report.operands.size() == 2);
  CHECK(std::abs(report.operands[0].deviation - 3.0) < 1e-12);
  CHECK(std::abs(report.operands[1].deviation + 4.0) < 1e-12);
  CHECK(std::abs(report.operands[0].contribution_percent - 36.0) < 1e-9);
  CHECK(std::abs(report.operands[1].contribution_percent - 64.0) < 1e-9);
  CHECK_FALSE(report.penalty);

  SUBCASE("on target") {
    ops[0].target = s.effl;
    ops[1].target = s.totr;
    CHECK(merit_value(sys, ops).value == 0.0);
  }
  SUBCASE("satisfied less-than contributes nothing") {
    ops[1] = {OperandKind::totr, s.totr + 4.0, 1.0, OperandMode::less_than, 0};
    const auto r = merit_value(sys, ops);
    CHECK(r.operands[1].deviation == 0.0);
    CHECK(std::abs(r.value - std::sqrt(9.0 / 2.0)) < 1e-12);
  }
  SUBCASE("violated less-than counts") {
    ops[1] = {OperandKind::totr, s.totr - 4.0, 1.0, OperandMode::less_than, 0};
    CHECK(std::abs(merit_value(sys, ops).value - std::sqrt(25.0 / 2.0)) < 1e-12);
  }
}

TEST_CASE("merit value ignores weight scale and operand order") {
  const auto r = relay();
  auto ops = load_merit(test::data_path("relay.merit"));
  const double base = merit_value(r, ops).value;
  CHECK(std::abs(base - 0.004534) < 1e-5);
  CHECK(base < 0.05);

  for (double k : {0.001, 3.0, 1e4}) {
    auto scaled = ops;
    for (auto& op : scaled) op.weight *= k;
    CHECK(std::abs(merit_value(r, scaled).value - base) <= 1e-12 * base);
  }
  auto shuffled = ops;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(std::abs(merit_value(r, shuffled).value - base) <= 1e-12 * base);
  std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
  CHECK(std::abs(merit_value(r, shuffled).value - base) <= 1e-12 * base);
}

TEST_CASE("operand values in native units") {
  const auto r = relay();
  const auto s = system_summary(r);
  CHECK(operand_value(r, {OperandKind::effl, 0, 1, OperandMode::equals, 0}) == s.effl);
  CHECK(operand_value(r, {OperandKind::totr, 0, 1, OperandMode::equals, 0}) == s.totr);
  const double spot = operand_value(r, {OperandKind::spot_rms, 0, 1, OperandMode::equals, 2});
  CHECK(spot > 0.0);
  CHECK(spot < 2.27e-3);  // mm, below the Airy radius
  const double opd = operand_value(r, {OperandKind::opd_rms, 0, 1, OperandMode::equals, 2});
  CHECK(opd > 0.0);
  CHECK(opd < 0.05);
  CHECK(operand_value(r, {OperandKind::dist_max, 0, 1, OperandMode::equals, 0}) <= 0.05);
  CHECK(kind_of([&] { operand_value(r, {OperandKind::spot_rms, 0, 1, OperandMode::equals, 3}); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("broken systems score the penalty instead of throwing") {
  // A 1 mm sphere inside a 3 mm beam: the outer rays miss it.
  const auto r = relay().with_profile(1, Profile::sphere(1.0));
  const std::vector<Operand> ops = {{OperandKind::spot_rms, 0.0, 1.0, OperandMode::equals, 0}};
  const auto report = merit_value(r, ops);
  CHECK(report.penalty);
  CHECK(report.value == kMeritPenalty);
  CHECK_FALSE(report.failure.empty());
}

TEST_CASE("merit errors") {
  const auto sys = test::plano_convex(50.0, 4.0, 1.5, 90.0);
  CHECK(kind_of([&] { merit_value(sys, std::vector<Operand>{}); }) == ErrorKind::empty_merit_function);
  CHECK(kind_of([&] {
          merit_value(sys, std::vector<Operand>{{OperandKind::effl, 100, 0.0, OperandMode::equals, 0}});
        }) == ErrorKind::empty_merit_function);
  CHECK(kind_of([&] { local_optimize(sys, kEffl100, VariableSet{}); }) == ErrorKind::no_variables);
  CHECK(kind_of([&] { local_optimize(sys, kEffl100, parse_variables("G1", sys)); }) == ErrorKind::no_variables);
}

TEST_CASE("merit file parsing") {
  const auto ops = parse_merit("# c\nEFFL 9.5 10\nTOTR 20 1 <\nSPOT-RMS 0 100 = 3\nopd-rms 0 2 equals 1\nDIST-MAX 0 1 less-than\n");
  REQUIRE(ops.size() == 5);
  CHECK(ops[0].kind == OperandKind::effl);
  CHECK(ops[1].mode == OperandMode::less_than);
  CHECK(ops[2].field == 2);
  CHECK(ops[3].kind == OperandKind::opd_rms);
  CHECK(ops[3].field == 0);
  CHECK(ops[4].mode == OperandMode::less_than);

  const auto again = parse_merit(format_merit(ops));
  REQUIRE(again.size() == ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    CHECK(again[i].kind == ops[i].kind);
    CHECK(again[i].target == ops[i].target);
    CHECK(again[i].weight == ops[i].weight);
    CHECK(again[i].mode == ops[i].mode);
    CHECK(again[i].field == ops[i].field);
  }

  for (const char* bad : {"EFFL 9.5\n", "FOO 1 1\n", "EFFL x 1\n", "EFFL 1 -2\n", "SPOT-RMS 0 1 = 0\n",
                          "EFFL 1 1 = 1 extra\n"}) {
    CAPTURE(bad);
    try {
      parse_merit(std::string("# header\n") + bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  CHECK(kind_of([] { load_merit("/nonexistent/x.merit"); }) == ErrorKind::io_failure);
}

TEST_CASE("variable parsing") {
  const auto r = relay();
  const auto v = parse_variables("C2, C3 T3:0.05:1 G2", r);
  REQUIRE(v.entries.size() == 4);
  CHECK(v.entries[0].kind == VariableKind::curvature);
  CHECK(v.entries[0].surface == 1);
  CHECK(v.entries[2].kind == VariableKind::thickness);
  CHECK(v.entries[2].lower == 0.05);
  CHECK(v.entries[2].upper == 1.0);
  CHECK(v.continuous().size() == 3);
  CHECK(v.material_surfaces() == std::vector<std::size_t>{1});
  CHECK(parse_variables("T2", r).entries[0].lower == 0.0);
  CHECK(parse_variables("T2::5", r).entries[0].upper == 5.0);
  for (const char* bad : {"C0", "C9", "X2", "T3:2:1", "G3", "C", "T3:a:"}) {
    CAPTURE(bad);
    CHECK(kind_of([&] { parse_variables(bad, r); }) == ErrorKind::invalid_argument);
  }
  const auto d = default_variables(r);
  CHECK(d.continuous().size() == 4);  // four refracting curvatures, the plano stop excluded
  CHECK(d.material_surfaces() == std::vector<std::size_t>{1, 3});
}

TEST_CASE("singlet converges to the lensmaker radius") {
  for (double r0 : {60.0, 42.0, 80.0}) {
    CAPTURE(r0);
    const auto sys = test::plano_convex(r0, 4.0, 1.5, 90.0);
    const auto res = local_optimize(sys, kEffl100, parse_variables("C1", sys), 25);
    CHECK(res.iterations <= 25);
    CHECK(non_increasing(res.mf_trace));
    CHECK(std::abs(res.system.surface(0).profile.radius() - 50.0) < 1e-6);
    CHECK(res.mf_trace.back() < 1e-6);
    CHECK_FALSE(res.jacobian_degenerate);
  }
}

TEST_CASE("local optimizer fixed point and degenerate Jacobian") {
  const auto at_optimum = test::plano_convex(50.0, 4.0, 1.5, 90.0);
  const auto res = local_optimize(at_optimum, kEffl100, parse_variables("C1", at_optimum));
  CHECK(res.system == at_optimum);
  CHECK(res.iterations == 0);

  // The back gap has no effect on the focal length.
  const auto off = test::plano_convex(60.0, 4.0, 1.5, 90.0);
  const auto deg = local_optimize(off, kEffl100, parse_variables("T2", off));
  CHECK(deg.jacobian_degenerate);
  CHECK(deg.system == off);
}

TEST_CASE("bounds are respected") {
  const auto sys = test::plano_convex(60.0, 4.0, 1.5, 90.0);
  // Curvature capped below the optimum 1/50.
  const auto res = local_optimize(sys, kEffl100, parse_variables("C1::0.019", sys));
  CHECK(res.system.surface(0).profile.curvature() <= 0.019);
  CHECK(non_increasing(res.mf_trace));
}

TEST_CASE("relay local optimization never worsens the merit") {
  const auto r = relay();
  const auto ops = load_merit(test::data_path("relay.merit"));
  const auto res = local_optimize(r, ops, default_variables(r), 5);
  CHECK(non_increasing(res.mf_trace));
  CHECK(std::abs(merit_value(res.system, ops).value - res.mf_trace.back()) < 1e-15);
}

TEST_CASE("hammer optimization") {
  const auto r = relay();
  const auto ops = load_merit(test::data_path("relay.merit"));
  const auto cat = glass::load_catalog(test::data_path("glass/relay_glasses.cat"));
  HammerOptions opt;
  opt.budget = 5;
  opt.seed = 42;
  opt.local_iterations = 4;
  const auto a = hammer_optimize(r, ops, default_variables(r), cat, opt);
  const auto b = hammer_optimize(r, ops, default_variables(r), cat, opt);

  CHECK(a.final_mf <= a.initial_mf);
  CHECK(a.initial_mf == merit_value(r, ops).value);
  CHECK(a.final_mf == merit_value(a.system, ops).value);
  CHECK(a.final_mf < 0.05);
  CHECK(a.system == b.system);
  CHECK(a.final_mf == b.final_mf);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].move == b.history[i].move);
    CHECK(a.history[i].candidate_mf == b.history[i].candidate_mf);
  }
  double incumbent = a.initial_mf;
  bool restarted = false;
  for (const auto& e : a.history) {
    CHECK(e.incumbent_mf <= incumbent);
    incumbent = e.incumbent_mf;
    restarted = restarted || e.move == "restart";
  }
  CHECK(restarted);
  for (std::size_t s : default_variables(r).material_surfaces())
    CHECK(cat.find(a.system.surface(s).material_after.name()) != nullptr);
}

TEST_CASE("hammer with nothing to substitute") {
  const auto r = relay();
  const auto ops = load_merit(test::data_path("relay.merit"));
  glass::GlassCatalog own;
  own.add(glass::default_catalog().at("SK14"));
  own.add(glass::default_catalog().at("F7"));
  HammerOptions opt;
  opt.budget = 1;
  const auto res = hammer_optimize(r, ops, default_variables(r), own, opt);
  CHECK(res.final_mf <= res.initial_mf);

  // An empty catalog leaves only restart moves.
  opt.budget = 4;
  opt.local_iterations = 2;
  const auto restarts = hammer_optimize(r, ops, default_variables(r), glass::GlassCatalog{}, opt);
  CHECK(restarts.final_mf <= restarts.initial_mf);
  for (const auto& e : restarts.history) CHECK(e.move == "restart");
  CHECK(kind_of([&] {
          opt.budget = 0;
          hammer_optimize(r, ops, default_variables(r), own, opt);
        }) == ErrorKind::invalid_argument);
}
