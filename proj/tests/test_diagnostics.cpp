#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "mcflab/diagnostics.hpp"
#include "mcflab/error.hpp"

using namespace mcf;
using std::numbers::pi;

namespace {

std::shared_ptr<const TranslatorProfile> share(TranslatorProfile p) {
  return std::make_shared<const TranslatorProfile>(std::move(p));
}

Field sample(double lo, double hi, double h, double (*fn)(double)) {
  return Field::sample_interval(Grid1D::with_spacing(lo, hi, h), fn);
}

double gr(double x) { return grim_reaper(x).u; }
double arc(double x) { return std::sqrt(1.0 - x * x); }

double sup_interior_error(const Field& f, const Field& ref_src, double (*ref)(double)) {
  (void)ref_src;
  double e = 0.0;
  for (int i = 1; i < f.n_nodes(0) - 1; ++i)
    e = std::max(e, std::abs(f(i) - ref(f.grid(0).node(i))));
  return e;
}

// Upper arc of the shrinking circle of radius sqrt(1 - 2t) on [-a, a] with
// exact boundary values, recorded every `stride` steps.
Trajectory shrinking_arc(double a, int cells, double T, int stride) {
  auto exact = [](double x, double t) { return std::sqrt(1.0 - 2.0 * t - x * x); };
  const Grid1D g(-a, a, cells);
  const Field f = Field::sample_interval(g, [&](double x) { return exact(x, 0.0); });
  const BoundaryPolicy bp = BoundaryPolicy::all(FacePolicy::translating(0.0));
  const int steps = static_cast<int>(std::ceil(T / cfl_dt(f)));
  const double dt = T / steps;
  Trajectory tr;
  FlowState s = make_state(f, bp);
  tr.snapshots.push_back(s);
  for (int k = 1; k <= steps; ++k) {
    s = step(s, dt);
    std::vector<double> v(s.field.values().begin(), s.field.values().end());
    v.front() = exact(g.lo(), s.t);
    v.back() = exact(g.hi(), s.t);
    s = make_state(s.field.with_values(std::move(v)), bp, s.t);
    if (k % stride == 0) tr.snapshots.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("curvature of sampled curves") {
  const Field line = sample(-1, 1, 0.05, [](double x) { return 2.0 * x - 1.0; });
  const Field kline = curvature_1d(line);
  for (double k : kline.values()) CHECK(std::abs(k) <= 1e-12);

  // The upper arc bends downward: kappa = -1 with the upward normal.
  double prev = 0.0;
  for (double h : {0.02, 0.01}) {
    const Field f = sample(-0.7, 0.7, h, arc);
    const double e = sup_interior_error(curvature_1d(f), f, [](double) { return -1.0; });
    if (prev > 0.0) CHECK(prev / e >= 3.5);
    prev = e;
  }
  CHECK(prev <= 1e-3);

  const Field g = sample(-1.3, 1.3, 0.005, gr);
  CHECK(sup_interior_error(curvature_1d(g), g, [](double x) { return std::cos(x); }) <= 1e-4);

  const Grid1D x1(-1, 1, 20), x2(-1, 1, 20);
  const Field bowlish = Field::sample_slab(x1, x2, [](double a, double b) { return 0.5 * (a * a + b * b); });
  const SurfaceCurvature sc = curvature_2d(bowlish);
  CHECK(sc.H(10, 10) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sc.A_norm(10, 10) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sc.v(10, 10) == doctest::Approx(1.0));
  const Field rad = Field::sample_radial(Grid1D(0, 1, 20), 2, [](double r) { return 0.5 * r * r; });
  CHECK(curvature_2d(rad).H(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("total curvature") {
  CHECK(total_curvature(sample(-1, 1, 0.1, [](double x) { return 3 * x; })) ==
        doctest::Approx(0.0));
  for (double a : {0.5, 1.0, 1.3}) {
    const Field f = Field::sample_interval(Grid1D::with_spacing(-a, a, a / 200), gr);
    CHECK(std::abs(total_curvature(f) - 2 * a) <= 1e-4);
    CHECK(std::abs(total_curvature_completed(f) - pi) <= 1e-3);
  }
  const double a = 0.6;
  const Field c = Field::sample_interval(Grid1D::with_spacing(-a, a, a / 300), arc);
  CHECK(std::abs(total_curvature(c) - 2 * std::asin(a)) <= 1e-4);
}

TEST_CASE("monotonicity audit") {
  CHECK(monotonicity_audit({0.0}, {1.0}, 0.0).worst_increase == 0.0);
  const auto r = monotonicity_audit({0, 1, 2, 3}, {3.0, 2.0, 2.5, 1.0}, 0.1);
  CHECK(r.worst_increase == doctest::Approx(0.5));
  CHECK(r.worst_t == 2.0);
  CHECK_FALSE(r.pass);

  const auto grp = share(TranslatorProfile::grim_reaper_1d());
  const Field f = Field::sample_interval(Grid1D::with_spacing(-1.3, 1.3, 1.0 / 100), gr);
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 200;
  const Trajectory tr = evolve(make_state(f, BoundaryPolicy::all(FacePolicy::exact(grp))), cfg);
  const auto audit = monotonicity_audit(tr, false);
  CHECK(audit.pass);
  double lo = 1e9, hi = -1e9;
  for (const auto& s : tr.snapshots) {
    lo = std::min(lo, total_curvature(s.field));
    hi = std::max(hi, total_curvature(s.field));
  }
  CHECK(hi - lo <= 1e-4);
}

TEST_CASE("phi mass") {
  const auto p = TranslatorProfile::grim_reaper_1d();
  const Grid1D g = Grid1D::with_spacing(-1.4, 1.4, 0.01);
  const Field shifted = Field::sample_interval(g, [](double x) { return gr(x) + 0.7; });
  CHECK(phi_mass(shifted, p, 0.7) == doctest::Approx(0.0).epsilon(1e-14));
  const double w = 0.6, A = 0.1 * pi / w;
  const Field bumped = Field::sample_interval(g, [&](double x) {
    return gr(x) + (std::abs(x) < w ? A * std::pow(std::cos(pi * x / (2 * w)), 2) : 0.0);
  });
  CHECK(phi_mass(bumped, p, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(phi_mass(bumped, p, 0.0, TailCompletion::asymptotes) ==
        doctest::Approx(0.1).epsilon(1e-12));
  const Field lifted = Field::sample_interval(g, [](double x) { return gr(x) + 1.0; });
  CHECK(phi_mass(lifted, p, 0.0, TailCompletion::asymptotes) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("translation fits") {
  SUBCASE("pure vertical shift") {
    const auto p = TranslatorProfile::grim_reaper_1d();
    const Grid1D g = Grid1D::with_spacing(-1.4, 1.4, 0.01);
    const Field f = Field::sample_interval(g, [](double x) { return gr(x) + 2.0 + 0.3; });
    const FitWindow w = FitWindow::interval(-1.0, 1.0);
    w.validate(f);
    const FitResult r = fit_translation(f, p, 2.0, w);
    CHECK(r.c0 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.c1 == 0.0);
    CHECK(r.residual <= 1e-12);
  }
  SUBCASE("shifted wing-like table") {
    const double b = pi / 2 + 0.3, th = tilt_angle(b), ct = std::cos(th);
    auto wing = [&](double x1, double x2) {
      return std::tan(th) * std::sqrt(x1 * x1 + 1.0) - std::log(std::cos(x2 * ct)) / (ct * ct);
    };
    const Grid1D t1 = Grid1D::with_spacing(-4.0, 4.0, 0.05), t2 = Grid1D::with_spacing(-1.5, 1.5, 0.05);
    const auto table = TranslatorProfile::tabulated("wing", Field::sample_slab(t1, t2, wing), 0.0, 2, b, th);
    const Field f = Field::sample_slab(t1, t2, [&](double x1, double x2) {
      return std::abs(x1 + 0.2) <= 4.0 ? wing(x1 + 0.2, x2) + 1.0 : wing(x1, x2);
    });
    const FitWindow w = FitWindow::slab(-2.5, 2.5, -1.2, 1.2);
    FitOptions o;
    o.fit_c1 = true;
    o.c1_half_width = c1_bracket(0.5, th);
    const FitResult r = fit_translation(f, table, 1.0, w, o);
    CHECK(r.c1 == doctest::Approx(0.2).epsilon(1e-2));
    CHECK(std::abs(r.c0) <= 1e-3);
    CHECK_FALSE(r.flagged);
  }
  SUBCASE("window validation") {
    const Field f = sample(-1, 1, 0.1, gr);
    CHECK_THROWS_AS(FitWindow::interval(-0.8, 0.5).validate(f), Error);
    CHECK_NOTHROW(FitWindow::interval(-0.5, 0.5).validate(f));
  }
}

TEST_CASE("splitting check") {
  const double b = pi / 2 + 0.3;
  const Grid1D x1(-1, 1, 20), x2(-1.5, 1.5, 30);
  const Field tilted = Field::sample_slab(x1, x2, [&](double a, double c) { return tilted_grim_reaper(a, c, b).u; });
  CHECK(splitting_check(tilted, b) <= 1e-12);
  const Field bent = Field::sample_slab(x1, x2, [](double a, double c) { return 0.3 * a * a + c; });
  CHECK(splitting_check(bent, pi / 2) == doctest::Approx(0.3 * 2 * 0.9).epsilon(1e-9));
}

TEST_CASE("harnack residual") {
  SUBCASE("translator with large alpha") {
    const auto grp = share(TranslatorProfile::grim_reaper_1d());
    const Field f = Field::sample_interval(Grid1D::with_spacing(-1.3, 1.3, 1.0 / 100), gr);
    SolverConfig cfg;
    cfg.t_end = 0.3;
    cfg.snapshot_stride = 100;
    const Trajectory tr = evolve(make_state(f, BoundaryPolicy::all(FacePolicy::exact(grp))), cfg);
    const HarnackReport r = harnack_residual(tr, 1e3, FitWindow::interval(-1.0, 1.0));
    CHECK(r.status == CheckStatus::pass);
    CHECK(std::abs(r.min_residual) <= 1e-2);
  }
  SUBCASE("shrinking arc from t = 0") {
    const Trajectory tr = shrinking_arc(0.6, 120, 0.15, 40);
    // Flip the graph so the arc is convex (curvature positive) -- the flow
    // commutes with u -> -u.
    Trajectory flipped;
    for (const auto& s : tr.snapshots) {
      std::vector<double> v(s.field.values().begin(), s.field.values().end());
      for (double& x : v) x = -x;
      flipped.snapshots.push_back(FlowState{s.t, s.field.with_values(std::move(v)), s.policy});
    }
    const HarnackReport r = harnack_residual(flipped, 0.0, FitWindow::interval(-0.5, 0.5));
    CHECK(r.status == CheckStatus::pass);
  }
  SUBCASE("flat line is inconclusive") {
    const Field f = sample(-1, 1, 0.05, [](double x) { return 0.2 * x; });
    SolverConfig cfg;
    cfg.t_end = 0.01;
    const Trajectory tr = evolve(make_state(f, BoundaryPolicy::all(FacePolicy::translating(0.0))), cfg);
    CHECK(harnack_residual(tr, 0.0, FitWindow::interval(-0.5, 0.5)).status ==
          CheckStatus::inconclusive);
  }
}

TEST_CASE("Gaussian density and entropy") {
  SampleSet line;
  const double ds = 0.01;
  for (int k = -2000; k <= 2000; ++k) {
    line.x.push_back({k * ds, 0.0, 0.0});
    line.w.push_back(ds);
  }
  for (double t : {0.1, 1.0, 3.0}) CHECK(std::abs(f_functional(line, {0.0, 0.0, 0.0}, t) - 1.0) <= 1e-10);

  auto circle = [](double R, double cx, double cy) {
    SampleSet s;
    const int N = 400;
    for (int k = 0; k < N; ++k) {
      const double a = 2 * pi * k / N;
      s.x.push_back({cx + R * std::cos(a), cy + R * std::sin(a), 0.0});
      s.w.push_back(2 * pi * R / N);
    }
    return s;
  };
  const EntropyResult e = entropy_estimate(circle(std::sqrt(2.0), 0.0, 0.0));
  CHECK(std::abs(e.value - std::sqrt(2 * pi / std::exp(1.0))) <= 1e-3);
  CHECK(std::abs(e.t - 1.0) <= 1e-2);
  const EntropyResult moved = entropy_estimate(circle(std::sqrt(2.0), 3.0, -1.5));
  const EntropyResult scaled = entropy_estimate(circle(3.0 * std::sqrt(2.0), 0.0, 0.0));
  CHECK(std::abs(moved.value - e.value) <= 1e-3);
  CHECK(std::abs(scaled.value - e.value) <= 1e-3);

  SampleSet bad;
  CHECK_THROWS_AS(entropy_estimate(bad), Error);
}

TEST_CASE("bowl asymptotics") {
  const auto bowl = bowl_profile(2, 20.0, 0.0025);
  const PlateauReport p = bowl_asymptotic_check(bowl, 2, {}, std::array<double, 2>{10.0, 20.0});
  CHECK(p.total_variation <= 1e-2);
  const PlateauReport fine =
      bowl_asymptotic_check(bowl_profile(2, 20.0, 0.00125), 2, {}, std::array<double, 2>{10.0, 20.0});
  CHECK(std::abs(fine.plateau - p.plateau) <= 1e-3);
  const PlateauReport wrong = bowl_asymptotic_check(bowl, 2, 1.0 / 4.0);
  CHECK(wrong.total_variation > 10.0);
}

TEST_CASE("convexity margins") {
  const Field g = sample(-1.3, 1.3, 0.01, gr);
  CHECK(convexity_check(g) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(convexity_check(sample(-1, 1, 0.1, [](double x) { return 1 - x; })) ==
        doctest::Approx(0.0));
  const auto bowl = bowl_profile(2, 20.0, 0.0025);
  const Grid1D rg(0.0, 5.0, 100);
  const Field smooth = Field::sample_radial(rg, 2, [&](double r) { return bowl.value(r); });
  CHECK(convexity_check(smooth) > 0.0);
  const Field rippled =
      Field::sample_radial(rg, 2, [&](double r) { return bowl.value(r) + 2.0 * std::cos(3 * r); });
  CHECK(convexity_check(rippled) < 0.0);
  CHECK(convexity_check(smooth, ConvexityKind::mean) > 0.0);
}
