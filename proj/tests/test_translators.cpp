#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcflab/error.hpp"
#include "mcflab/translators.hpp"

using namespace mcf;
using std::numbers::pi;

TEST_CASE("grim reaper closed form") {
  const Jet j0 = grim_reaper(0.0);
  CHECK(j0.u == 0.0);
  CHECK(j0.u1 == 0.0);
  CHECK(j0.u11 == 1.0);
  CHECK(grim_reaper(pi / 3).u == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(grim_reaper(pi / 3).u1 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(grim_reaper(pi / 3).u11 == doctest::Approx(4.0).epsilon(1e-14));
  for (double x : {0.1, 0.7, 1.3, 1.5}) {
    CHECK(grim_reaper(x).u == grim_reaper(-x).u);
    CHECK(grim_reaper(x).u1 == -grim_reaper(-x).u1);
  }
  CHECK_THROWS_AS(grim_reaper(pi / 2), Error);
  CHECK_THROWS_AS(grim_reaper(-2.0), Error);
}

TEST_CASE("tilted grim reaper plane") {
  CHECK(tilt_angle(pi / 2) == 0.0);
  CHECK(tilt_angle(pi) == doctest::Approx(pi / 3).epsilon(1e-14));
  CHECK_THROWS_AS(tilt_angle(1.0), Error);

  // theta = 0 reduces to the grim reaper in x2 for every x1.
  for (double x1 : {-3.0, 0.0, 2.5}) {
    const Jet j = tilted_grim_reaper(x1, 0.4, pi / 2);
    CHECK(j.u == doctest::Approx(grim_reaper(0.4).u).epsilon(1e-15));
    CHECK(j.u1 == 0.0);
  }

  const double b = pi / 2 + 0.3;
  const double th = tilt_angle(b);
  for (double x1 : {-2.0, 0.3, 5.0})
    for (double x2 : {-1.7, -0.5, 0.0, 1.1, 1.8}) {
      const Jet j = tilted_grim_reaper(x1, x2, b);
      CHECK(j.u1 == std::tan(th));
      CHECK(j.u11 == 0.0);
      CHECK(j.u12 == 0.0);
      CHECK(tilted_grim_reaper(x1, -x2, b).u2 == -j.u2);
      // Q(Du, D^2u) - 1 evaluated on the analytic jet.
      const double q = (1 + j.u2 * j.u2) * j.u11 - 2 * j.u1 * j.u2 * j.u12 +
                       (1 + j.u1 * j.u1) * j.u22;
      CHECK(std::abs(q / (1 + j.u1 * j.u1 + j.u2 * j.u2) - 1.0) <= 1e-10);
    }
  CHECK_THROWS_AS(tilted_grim_reaper(0.0, b, b), Error);
}

TEST_CASE("cylinder radius") {
  CHECK(cylinder_radius(2, 1, -1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cylinder_radius(3, 1, -0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  for (double t : {-0.1, -1.0, -7.5}) {
    const double r = cylinder_radius(4, 2, t);
    CHECK(r * r / -t == doctest::Approx(4.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(cylinder_radius(2, 1, 0.0), Error);
  CHECK_THROWS_AS(cylinder_radius(2, 2, -1.0), Error);
  CHECK_THROWS_AS(cylinder_radius(1, 0, -1.0), Error);
  const auto p = TranslatorProfile::cylinder_shrinker(3, 1);
  CHECK(p.kind() == ProfileKind::cylinder_shrinker);
  CHECK(p.k() == 1);
}

TEST_CASE("translator residual on sampled fields") {
  SUBCASE("grim reaper, h = 1e-3") {
    const Grid1D g = Grid1D::with_spacing(-1.4, 1.4, 1e-3);
    const Field f = Field::sample_interval(g, [](double x) { return grim_reaper(x).u; });
    const NodalResidual r = translator_residual(f);
    CHECK(r.valid.front() == 0);
    CHECK(r.valid.back() == 0);
    CHECK(r.sup_abs() <= 1e-5);
  }
  SUBCASE("affine gives -1") {
    const Grid1D g(0.0, 1.0, 16);
    const Field f = Field::sample_interval(g, [](double x) { return 2.0 - 0.5 * x; });
    const NodalResidual r = translator_residual(f);
    for (int i = 1; i < g.n_cells(); ++i) CHECK(r.values(i) == doctest::Approx(-1.0));
  }
  SUBCASE("tilted plane converges at second order") {
    const double b = pi / 2 + 0.3;
    double prev = 0.0;
    for (int level = 0; level < 2; ++level) {
      const double h = 0.05 / (1 << level);
      const Grid1D x1 = Grid1D::with_spacing(-1.0, 1.0, h);
      const Grid1D x2 = Grid1D::with_spacing(-1.5, 1.5, h);
      const Field f = Field::sample_slab(
          x1, x2, [&](double a, double c) { return tilted_grim_reaper(a, c, b).u; });
      const NodalResidual r = translator_residual(f);
      // Fixed point (0.5, 1.2).
      const int i = static_cast<int>(std::lround(1.5 / h));
      const int j = static_cast<int>(std::lround(2.7 / h));
      const double e = std::abs(r.values(i, j));
      if (level == 1) {
        const double order = std::log2(prev / e);
        CHECK(order >= 1.9);
        CHECK(order <= 2.1);
      }
      prev = e;
    }
  }
}

TEST_CASE("closed-form profiles evaluate exactly") {
  const auto plane = TranslatorProfile::grim_reaper_plane();
  for (double x1 : {-10.0, 0.0, 3.0}) CHECK(plane.value(x1, 0.0) == 0.0);
  const auto gr = TranslatorProfile::grim_reaper_1d();
  CHECK(gr.value(pi / 3) == grim_reaper(pi / 3).u);
  CHECK(gr.eval(0.2).err == 0.0);
  CHECK_THROWS_AS(gr.eval(1.6), Error);
  CHECK_FALSE(gr.in_domain(-1.6));
  const auto tp = TranslatorProfile::tilted_plane(2.0);
  CHECK(tp.b().value() == 2.0);
  CHECK(tp.theta() == doctest::Approx(std::acos(pi / 4.0)));
}

TEST_CASE("bowl profile") {
  const TranslatorProfile bowl = bowl_profile(2, 20.0, 0.0025);
  REQUIRE(bowl.kind() == ProfileKind::bowl);
  const Field& t = *bowl.table();
  CHECK(bowl.residual_sup() <= 1e-6);
  CHECK(t(0) == 0.0);

  // Reference values from an independent adaptive 8th-order integration.
  CHECK(bowl.value(1.0) == doctest::Approx(0.2580261670372251).epsilon(1e-9));
  CHECK(bowl.value(5.0) == doctest::Approx(10.284245024623699).epsilon(1e-9));
  CHECK(bowl.value(10.0) == doctest::Approx(47.05538972604325).epsilon(1e-9));
  CHECK(bowl.eval(10.0).u1 == doctest::Approx(9.897879917452281).epsilon(1e-6));

  // u''(0) = 1/n from the symmetric second difference at the origin.
  const double h = t.grid().h();
  CHECK(std::abs(2.0 * (t(1) - t(0)) / (h * h) - 0.5) <= 1e-6);

  // Strict convexity: u' increasing.
  for (int i = 1; i + 1 < t.n_nodes(0); ++i)
    REQUIRE(t(i + 1) - t(i) > t(i) - t(i - 1));

  // Node values are reproduced exactly; midpoints agree with a finer table.
  CHECK(bowl.value(t.grid().node(137)) == t(137));
  const TranslatorProfile fine = bowl_profile(2, 20.0, 0.00125);
  for (double r : {0.005, 2.345, 7.005, 15.555})
    CHECK(std::abs(bowl.value(r) - fine.value(r)) <= 1e-6);

  const TranslatorProfile b3 = bowl_profile(3, 20.0, 0.0025);
  CHECK(b3.value(10.0) == doctest::Approx(23.10983350676994).epsilon(1e-9));

  CHECK_THROWS_AS(bowl_profile(1, 20.0, 0.01), Error);
  CHECK_THROWS_AS(bowl_profile(2, 5.0, 0.001), Error);
  CHECK_THROWS_AS(bowl_profile(2, 20.0, 0.05), Error);
  try {
    bowl_profile(2, 20.0, 0.02);
    FAIL("expected the coarse table to miss the residual bound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_converged);
  }
}

TEST_CASE("sample_profile matches eval at nodes") {
  const Grid1D g(-1.0, 1.0, 20);
  const Field like = Field::interval(g, std::vector<double>(21, 0.0));
  const Field s = sample_profile(TranslatorProfile::grim_reaper_1d(), like);
  for (int i = 0; i < 21; ++i) CHECK(s(i) == grim_reaper(g.node(i)).u);
}
