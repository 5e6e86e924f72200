#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "mcflab/barriers.hpp"
#include "mcflab/error.hpp"

using namespace mcf;
using std::numbers::pi;

namespace {

struct PancakeRow {
  int n;
  double lambda, T, T0, C, R, Q;
};

// Evaluated independently at 40 significant digits.
const PancakeRow kPancake[] = {
    {1, 0.1, 0, 1, 0, 16.707963267948966192, 1.0},
    {2, 0.1, 3, 0.5, 0, 103.57159540460697665, 48.168016923877428896},
    {3, 0.1, 0.5, 2, 1.5, 49.060605501450605613, 8.9422358740355437335},
    {4, 0.1, 10, 3.5, 1.5, 371.88758703558214467, 158.21201403958125288},
    {5, 0.1, 1, 1, -0.75, 49.758588784416469646, 16.884471748071087467},
    {1, 0.3, 0, 0.5, -0.75, 3.4747544292087885632, 1.0},
    {2, 0.3, 3, 2, 2, 44.299393614563178672, 16.840344628040557148},
    {3, 0.3, 0.5, 3.5, 2, 26.783183257327253953, 3.8827565981746762775},
    {4, 0.3, 10, 1, 0, 114.59725260779893626, 53.757021640104660176},
    {5, 0.3, 1, 0.5, 0, 17.319466438551159364, 6.7655131963493525549},
    {1, 0.5, 0, 2, 1.5, 7.7606501364552724842, 1.0},
    {2, 0.5, 3, 3.5, 1.5, 32.767961153911469149, 10.645413560922031309},
    {3, 0.5, 0.5, 1, -0.75, 8.9432394515506716883, 3.012067527100199806},
    {4, 0.5, 10, 0.5, -0.75, 70.234483327214258697, 33.077833336355887165},
    {5, 0.5, 1, 2, 2, 18.8831059053552171, 5.024135054200399612},
    {1, 0.7, 0, 3.5, 2, 9.7452493152890969765, 1.0},
    {2, 0.7, 3, 1, 0, 18.295500602178925039, 8.0408740979061263132},
    {3, 0.7, 0.5, 0.5, 0, 6.1681179174685638777, 2.7397770567094934752},
    {4, 0.7, 10, 2, 1.5, 57.329876440568770434, 24.366617046282516967},
    {5, 0.7, 1, 3.5, 1.5, 19.930691342608052941, 4.4795541134189869505},
};

std::shared_ptr<const TranslatorProfile> share(TranslatorProfile p) {
  return std::make_shared<const TranslatorProfile>(std::move(p));
}

Trajectory grim_reaper_run(double h, double T, double offset = 0.0, int stride = 50) {
  const auto gr = share(TranslatorProfile::grim_reaper_1d());
  const Grid1D g = Grid1D::with_spacing(-1.45, 1.45, h);
  const Field f =
      Field::sample_interval(g, [&](double x) { return grim_reaper(x).u + offset; });
  SolverConfig cfg;
  cfg.t_end = T;
  cfg.snapshot_stride = stride;
  return evolve(make_state(f, BoundaryPolicy::all(FacePolicy::translating())), cfg);
}

// Trajectory made of hand-built snapshots.
Trajectory synthetic(std::vector<Field> fields, std::vector<double> times) {
  Trajectory tr;
  const BoundaryPolicy bp = BoundaryPolicy::all(FacePolicy::translating());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    tr.snapshots.push_back(make_state(fields[k], bp, times[k]));
    tr.steps.push_back(static_cast<std::int64_t>(k));
  }
  return tr;
}

}  // namespace

TEST_CASE("pancake formulas match high-precision values") {
  for (const auto& row : kPancake) {
    const PancakeConstants pc{row.T0, row.C};
    CHECK(std::abs(pancake_radius(row.n, row.lambda, row.T, pc) / row.R - 1.0) <= 1e-12);
    CHECK(std::abs(pancake_margin(row.n, row.lambda, row.T) / row.Q - 1.0) <= 1e-12);
  }
  // 3 pi + ln(3 pi^2)/pi + 1 and pi + ln 2/pi + 1.
  CHECK(pancake_radius(2, 0.5, 1.0) == doctest::Approx(11.5032347926873).epsilon(1e-13));
  CHECK(pancake_margin(2, 0.5, 1.0) == doctest::Approx(4.36222825374244).epsilon(1e-13));
}

TEST_CASE("pancake formula structure") {
  for (double lambda : {0.05, 0.4, 0.7})
    for (double T : {0.0, 1.0, 7.0}) {
      const PancakeConstants pc{1.3, 0.4};
      const double no_log = pi * (2 * T + pc.T0) / (2 * lambda) + 2 * lambda * pc.C / pi + 1;
      CHECK(pancake_radius(1, lambda, T, pc) == no_log);
      CHECK(pancake_radius(3, lambda, T + 0.5, pc) > pancake_radius(3, lambda, T, pc));
      CHECK(pancake_margin(1, lambda, 0.0) == 1.0);
      CHECK(pancake_margin(4, lambda, 0.0) == 2.0 * 3 * lambda / pi * std::log(2.0) + 1.0);
    }
  CHECK_THROWS_AS(pancake_radius(2, 0.0, 1.0), Error);
  CHECK_THROWS_AS(pancake_margin(2, -0.1, 1.0), Error);
  CHECK_THROWS_AS(pancake_radius(2, 0.5, 1.0, PancakeConstants{0.0, 0.0}), Error);
}

TEST_CASE("c0 estimate check") {
  SUBCASE("exact translation passes with slack >= Q - T") {
    const Trajectory tr = grim_reaper_run(1.0 / 40, 0.5);
    const double lambda = 0.2;
    const CheckResult r = c0_estimate_check(tr, 1.0, lambda, pi / 2);
    CHECK(r.status == CheckStatus::pass);
    CHECK(r.slack >= pancake_margin(1, lambda, 0.5) - 0.5);
    // The truncation 1.45 does not reach pi/2 - 0.1.
    CHECK(c0_estimate_check(tr, 1.0, 0.1, pi / 2).status == CheckStatus::inconclusive);
  }
  SUBCASE("violations fail and wider r never helps") {
    const Grid1D x1(-30.0, 30.0, 60), x2(-1.2, 1.2, 12);
    const Field calm = Field::sample_slab(x1, x2, [](double a, double) { return 0.01 * a; });
    const Field wild = Field::sample_slab(
        x1, x2, [](double a, double c) { return std::abs(a) < 2 && std::abs(c) < 0.5 ? 50.0 : 0.0; });
    const Trajectory bad = synthetic({calm, wild}, {0.0, 1.0});
    const CheckResult r = c0_estimate_check(bad, 1.0, 0.3, 1.5);
    CHECK(r.status == CheckStatus::fail);
    CHECK(r.slack < 0.0);

    const Trajectory ok = synthetic({calm, calm}, {0.0, 1.0});
    double prev = 1e300;
    for (double rad : {1.0, 4.0, 8.0, 12.0, 40.0}) {
      const CheckResult c = c0_estimate_check(ok, rad, 0.3, 1.5);
      if (c.status == CheckStatus::inconclusive) continue;
      CHECK(c.slack <= prev);
      prev = c.slack;
    }
    CHECK(c0_estimate_check(ok, 40.0, 0.3, 1.5).status == CheckStatus::inconclusive);
  }
  SUBCASE("radial is inconclusive") {
    const Field f = Field::radial(Grid1D(0, 1, 10), 2, std::vector<double>(11, 0.0));
    CHECK(c0_estimate_check(synthetic({f}, {0.0}), 1.0, 0.3, 1.5).status ==
          CheckStatus::inconclusive);
  }
}

TEST_CASE("sphere window and continuity") {
  CHECK(sphere_window(0.2, 0.1, 1) == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(sphere_window(0.2, 0.05, 1) == doctest::Approx(0.0025 / 4).epsilon(1e-15));
  CHECK(sphere_window(0.2, 0.1, 2) == doctest::Approx(0.00125).epsilon(1e-15));

  const Trajectory tr = grim_reaper_run(1.0 / 80, 0.01, 0.0, 4);
  for (double x0 : {0.0, 0.6, -1.1}) {
    const double delta = 0.1;
    const double eps = continuity_eps(tr.front().field, x0, delta);
    CHECK(eps > delta);
    const CheckResult r = continuity_check(tr, x0, eps, delta);
    CHECK(r.status == CheckStatus::pass);
  }
  CHECK(continuity_check(tr, 0.0, 0.05, 0.1).status == CheckStatus::inconclusive);
  // Steep spot: oscillation above eps.
  CHECK(continuity_check(tr, 1.4, 0.11, 0.1).status == CheckStatus::inconclusive);
}

TEST_CASE("squeeze check") {
  const auto gr = TranslatorProfile::grim_reaper_1d();
  const double h = 1.0 / 80;
  SUBCASE("equality case") {
    const SqueezeReport rep = squeeze_check(grim_reaper_run(h, 0.5), gr, 0.0);
    CHECK(rep.worst <= 10 * h * h);
    CHECK(rep.t.size() == rep.below.size());
  }
  SUBCASE("upper barrier itself") {
    const SqueezeReport rep = squeeze_check(grim_reaper_run(h, 0.5, 0.2), gr, 0.2);
    double above = 0.0;
    for (double a : rep.above) above = std::max(above, a);
    CHECK(above <= 10 * h * h);
  }
  SUBCASE("bump of size C0") {
    const Grid1D g = Grid1D::with_spacing(-1.45, 1.45, h);
    const double C0 = 0.3;
    const Field f = Field::sample_interval(g, [&](double x) {
      return grim_reaper(x).u + (std::abs(x - 0.2) < 0.5 ? C0 * std::pow(std::cos(pi * (x - 0.2)), 2) : 0.0);
    });
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 100;
    const Trajectory tr = evolve(make_state(f, BoundaryPolicy::all(FacePolicy::translating())), cfg);
    CHECK(squeeze_check(tr, gr, C0).worst <= 10 * h * h);
    CHECK(squeeze_check(tr, gr, 0.5 * C0).worst > 0.1);
  }
}

TEST_CASE("avoidance check") {
  const Trajectory a = grim_reaper_run(1.0 / 40, 0.2);
  CHECK(avoidance_check(a, a).passed());
  const Trajectory up = grim_reaper_run(1.0 / 40, 0.2, 1.0);
  const CheckResult r = avoidance_check(a, up);
  CHECK(r.passed());
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_FALSE(avoidance_check(up, a).passed());
  CHECK_THROWS_AS(avoidance_check(a, grim_reaper_run(1.0 / 40, 0.3)), Error);
}

TEST_CASE("gradient envelope") {
  SUBCASE("gentle slope gives zero") {
    const Grid1D g(-2.0, 2.0, 40);
    const Field f = Field::sample_interval(g, [](double x) { return 0.5 * x; });
    SolverConfig cfg;
    cfg.t_end = 0.1;
    const Trajectory tr =
        evolve(make_state(f, BoundaryPolicy::all(FacePolicy::translating(0.0))), cfg);
    const CheckResult r = gradient_envelope(tr, 0.5);
    CHECK(r.passed());
    CHECK(r.value == 0.0);
  }
  SUBCASE("steep data: implied constant is grid-stable") {
    auto implied = [](double h) {
      const Grid1D g = Grid1D::with_spacing(-1.4, 1.4, h);
      const Field f =
          Field::sample_interval(g, [](double x) { return 2.0 * x + grim_reaper(x).u; });
      SolverConfig cfg;
      cfg.t_end = 0.05;
      cfg.snapshot_stride = 10;
      const Trajectory tr =
          evolve(make_state(f, BoundaryPolicy::all(FacePolicy::translating())), cfg);
      return gradient_envelope(tr, 0.5).value;
    };
    const double c1 = implied(1.0 / 20), c2 = implied(1.0 / 40);
    CHECK(c1 > 0.0);
    CHECK(std::abs(c1 / c2 - 1.0) <= 0.2);
  }
  SUBCASE("uncovered ball or time") {
    const Trajectory tr = grim_reaper_run(1.0 / 20, 0.001, 0.0, 1);
    CHECK(gradient_envelope(tr, 0.5).status == CheckStatus::inconclusive);
    CHECK(gradient_envelope(tr, 3.0).status == CheckStatus::inconclusive);
  }
}
