#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seqtrace/error.hpp"
#include "seqtrace/lens_file.hpp"
#include "seqtrace/seidel.hpp"
#include "support.hpp"

using namespace seqtrace;
using test::node;

namespace {

LensSystem relay() { return load_lens(test::data_path("reference_relay.lens")); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Biconvex singlet behind a free-standing stop `gap` mm in front of it.
LensSystem singlet_behind_stop(double gap) {
  return test::make_system({node(Profile::plano(), gap, glass::Material::air(), kUnbounded, true),
                            node(Profile::sphere(40.0), 5.0, test::constant_glass(1.62)),
                            node(Profile::sphere(-120.0), 60.0), test::image_plane()},
                           8.0, {0.0, 5.0});
}

}  // namespace

TEST_CASE("object and stop at the center of curvature: no aberration") {
  // Plano stop at the center of a concave-forward sphere; every paraxial ray
  // from the axial object point meets the sphere along a radius.
  const double t = 25.0;
  const auto sys = test::make_system(
      {node(Profile::plano(), t, glass::Material::air(), kUnbounded, true),
       node(Profile::sphere(-t), 30.0, test::constant_glass(1.7)), test::image_plane()});
  const auto table = seidel_table_from_rays(sys, {0.0, 0.08}, {0.0, 0.05}, 0.58756);
  REQUIRE(table.rows.size() == 2);
  for (const auto& row : table.rows)
    for (double v : row.length) CHECK(std::abs(v) < 1e-15);

  // With the stop elsewhere (chief ray from an off-axis object point), spherical
  // and coma still vanish because the marginal ray has zero incidence.
  const auto off = seidel_table_from_rays(sys, {0.0, 0.08}, {0.5, -0.5 / t}, 0.58756);
  CHECK(std::abs(off.rows[1].length[0]) < 1e-15);
  CHECK(std::abs(off.rows[1].length[1]) < 1e-15);
}

TEST_CASE("thin lens with the stop in contact has no distortion") {
  const auto g = test::constant_glass(1.5);
  for (double f : {50.0, 120.0}) {
    const auto sys = test::make_system({node(Profile::sphere(f), 0.0, g), node(Profile::sphere(-2.0 * f), f),
                                        test::image_plane()},
                                       10.0, {0.0, 10.0});
    const auto table = seidel_table(sys);
    CHECK(std::abs(table.sum.length[4]) < 1e-15);
  }
}

TEST_CASE("sum row and row count") {
  for (const auto& sys : {relay(), test::random_six_surface(7).with_fields({0.0, 3.0})}) {
    const auto table = seidel_table(sys);
    CHECK(table.rows.size() == sys.size() - 1);
    CHECK(table.wavelength == sys.primary_wavelength());
    for (std::size_t j = 0; j < 5; ++j) {
      double len = 0.0, waves = 0.0, scale = 0.0;
      for (const auto& row : table.rows) {
        len += row.length[j];
        waves += row.waves[j];
        scale += std::abs(row.length[j]);
        CHECK(row.waves[j] == row.length[j] / (sys.primary_wavelength() * 1e-3));
      }
      CHECK(std::abs(table.sum.length[j] - len) <= 1e-12 * scale);
      CHECK(std::abs(table.sum.waves[j] - waves) <= 1e-12 * scale / (sys.primary_wavelength() * 1e-3));
    }
  }
}

TEST_CASE("spherical aberration and Petzval do not depend on the stop position") {
  const auto base = seidel_table(singlet_behind_stop(0.0));
  for (double gap : {3.0, 10.0, 25.0}) {
    CAPTURE(gap);
    const auto moved = seidel_table(singlet_behind_stop(gap));
    for (std::size_t i = 1; i < base.rows.size(); ++i) {
      CHECK(rel(moved.rows[i].length[0], base.rows[i].length[0]) < 1e-12);
      CHECK(rel(moved.rows[i].length[3], base.rows[i].length[3]) < 1e-12);
    }
    // coma does move with the stop
    CHECK(rel(moved.sum.length[1], base.sum.length[1]) > 1e-3);
  }
  // Relocating the stop onto a lens surface.
  const auto on_lens = seidel_table(singlet_behind_stop(3.0).with_stop(2));
  for (std::size_t i = 1; i < base.rows.size(); ++i) {
    CHECK(rel(on_lens.rows[i].length[0], base.rows[i].length[0]) < 1e-12);
    CHECK(rel(on_lens.rows[i].length[3], base.rows[i].length[3]) < 1e-12);
  }
}

TEST_CASE("Petzval sum matches H² Σ (n'−n)/(n n' R)") {
  for (const auto& sys : {relay(), singlet_behind_stop(4.0), test::random_six_surface(11).with_fields({2.0})}) {
    const double l = sys.primary_wavelength();
    const double h = system_summary(sys).lagrange_invariant;
    double petzval = 0.0;
    for (std::size_t i = 0; i <= sys.last_optical_index(); ++i) {
      const auto& p = sys.surface(i).profile;
      if (p.kind() == ProfileKind::plano) continue;
      const double n = sys.index_before(i, l), np = sys.index_after(i, l);
      petzval += (np - n) / (n * np * p.radius());
    }
    CHECK(rel(seidel_table(sys).sum.length[3], h * h * petzval) < 1e-9);
  }
}

TEST_CASE("afocal input is refused") {
  const auto plate = test::make_system(
      {node(Profile::plano(), 5.0, test::constant_glass(1.6)), node(Profile::plano(), 10.0), test::image_plane()});
  try {
    seidel_table(plate);
    FAIL("expected AfocalSystem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::afocal_system);
  }
}
