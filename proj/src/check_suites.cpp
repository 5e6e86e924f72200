#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "mcflab/error.hpp"
#include "mcflab/experiments.hpp"
#include "mcflab/profile_io.hpp"

namespace mcf {

using std::numbers::pi;

namespace {

struct Line {
  std::string name;
  bool ok;
  double value;
  double tol;
};

using Suite = std::function<void(std::vector<Line>&)>;

// Pancake radius and margin at 40 significant digits (mpmath), columns
// n, lambda, T, T0, C, R, Q.
struct PancakeRef {
  int n;
  double lambda, T, T0, C, R, Q;
};

const PancakeRef kPancake[] = {
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

void formulas(std::vector<Line>& out) {
  double worst_r = 0.0, worst_q = 0.0;
  for (const auto& row : kPancake) {
    const PancakeConstants pc{row.T0, row.C};
    worst_r = std::max(worst_r, std::abs(pancake_radius(row.n, row.lambda, row.T, pc) / row.R - 1.0));
    worst_q = std::max(worst_q, std::abs(pancake_margin(row.n, row.lambda, row.T) / row.Q - 1.0));
  }
  out.push_back({"pancake_radius_spot_values", worst_r <= 1e-12, worst_r, 1e-12});
  out.push_back({"pancake_margin_spot_values", worst_q <= 1e-12, worst_q, 1e-12});

  // n = 1: the logarithmic term drops out exactly.
  double n1 = 0.0;
  for (double lam : {0.1, 0.45, 0.9})
    for (double T : {0.0, 2.0, 11.0}) {
      const PancakeConstants pc{1.7, 0.3};
      const double bare = pi * (2.0 * T + pc.T0) / (2.0 * lam) + 2.0 * lam * pc.C / pi + 1.0;
      n1 = std::max(n1, std::abs(pancake_radius(1, lam, T, pc) - bare));
    }
  out.push_back({"pancake_radius_n1_log_vanishes", n1 == 0.0, n1, 0.0});

  double tilt = 0.0;
  for (double b : {pi / 2, 2.0, 3.0, 10.0})
    tilt = std::max(tilt, std::abs(std::cos(tilt_angle(b)) - pi / (2.0 * b)));
  out.push_back({"tilt_angle_identity", tilt <= 1e-15, tilt, 1e-15});

  const double sw = std::abs(sphere_window(0.3, 0.2, 2) - 0.2 * 0.2 / 8.0);
  out.push_back({"sphere_window", sw <= 1e-17, sw, 1e-17});
}

void operators(std::vector<Line>& out) {
  auto sup_err = [](const Field& got, auto&& exact, bool skip_ends) {
    double e = 0.0;
    const int n0 = got.n_nodes(0);
    const int n1 = got.dims() == 2 ? got.n_nodes(1) : 1;
    for (int i = skip_ends ? 1 : 0; i < (skip_ends ? n0 - 1 : n0); ++i)
      for (int j = (got.dims() == 2 && skip_ends) ? 1 : 0;
           j < (got.dims() == 2 ? (skip_ends ? n1 - 1 : n1) : 1); ++j) {
        const double x1 = got.grid(0).node(i);
        const double x2 = got.dims() == 2 ? got.grid(1).node(j) : 0.0;
        e = std::max(e, std::abs((got.dims() == 2 ? got(i, j) : got(i)) - exact(x1, x2)));
      }
    return e;
  };

  const Grid1D g(-1.0, 2.0, 30);
  const Field q = Field::sample_interval(g, [](double x) { return 3.0 * x * x - x + 2.0; });
  const double e1 = sup_err(d1(q), [](double x, double) { return 6.0 * x - 1.0; }, true);
  const double e2 = sup_err(d2(q), [](double, double) { return 6.0; }, true);
  out.push_back({"interval_d1_quadratic_exact", e1 <= 1e-11, e1, 1e-11});
  out.push_back({"interval_d2_quadratic_exact", e2 <= 1e-9, e2, 1e-9});

  const Grid1D x1(-1.0, 1.0, 20), x2(-0.5, 1.5, 16);
  const Field s = Field::sample_slab(x1, x2, [](double a, double b) { return a * a - 2.0 * a * b + 0.5 * b * b + a; });
  const Hessian H = hessian(s);
  const double h11 = sup_err(H.d11, [](double, double) { return 2.0; }, true);
  const double h12 = sup_err(H.d12, [](double, double) { return -2.0; }, true);
  const double h22 = sup_err(H.d22, [](double, double) { return 1.0; }, true);
  const double hs = std::max({h11, h12, h22});
  out.push_back({"slab_hessian_quadratic_exact", hs <= 1e-9, hs, 1e-9});

  const Grid1D rg(0.0, 2.0, 40);
  const Field rq = Field::sample_radial(rg, 3, [](double r) { return 0.5 * r * r; });
  const double re = sup_err(d2(rq), [](double, double) { return 1.0; }, true);
  out.push_back({"radial_d2_quadratic_exact", re <= 1e-9, re, 1e-9});

  const Field aff = Field::sample_interval(g, [](double x) { return 0.25 * x - 3.0; });
  const double tz = std::abs(trapezoid(aff) - (0.25 * (4.0 - 1.0) / 2.0 - 3.0 * 3.0));
  out.push_back({"trapezoid_affine_exact", tz <= 1e-12, tz, 1e-12});

  const NodalResidual r = translator_residual(aff);
  double ra = 0.0;
  for (int i = 1; i < g.n_cells(); ++i) ra = std::max(ra, std::abs(r.values(i) + 1.0));
  out.push_back({"residual_of_line_is_minus_one", ra <= 1e-12, ra, 1e-12});
}

void profiles(std::vector<Line>& out) {
  // Sampled closed forms: the finite-difference residual at a fixed point
  // converges at second order.
  auto order_1d = [] {
    double prev = 0.0, order = 0.0;
    for (int level = 0; level < 2; ++level) {
      const double h = 0.02 / (1 << level);
      const Field f = Field::sample_interval(Grid1D::with_spacing(-1.2, 1.2, h),
                                             [](double x) { return grim_reaper(x).u; });
      const NodalResidual r = translator_residual(f);
      const double e = std::abs(r.values(static_cast<int>(std::lround(2.1 / h))));  // x = 0.9
      if (level == 1) order = std::log2(prev / e);
      prev = e;
    }
    return order;
  };
  auto order_2d = [] {
    const double b = pi / 2 + 0.3;
    double prev = 0.0, order = 0.0;
    for (int level = 0; level < 2; ++level) {
      const double h = 0.05 / (1 << level);
      const Field f = Field::sample_slab(Grid1D::with_spacing(-1.0, 1.0, h),
                                         Grid1D::with_spacing(-1.5, 1.5, h),
                                         [&](double a, double c) { return tilted_grim_reaper(a, c, b).u; });
      const NodalResidual r = translator_residual(f);
      const double e = std::abs(r.values(static_cast<int>(std::lround(1.5 / h)),
                                         static_cast<int>(std::lround(2.7 / h))));
      if (level == 1) order = std::log2(prev / e);
      prev = e;
    }
    return order;
  };
  const double o1 = order_1d(), o2 = order_2d();
  out.push_back({"grim_reaper_residual_order", o1 >= 1.9 && o1 <= 2.1, o1, 2.0});
  out.push_back({"tilted_plane_residual_order", o2 >= 1.9 && o2 <= 2.1, o2, 2.0});

  const TranslatorProfile bowl = bowl_profile(2, 20.0, 0.0025);
  const NodalResidual br = translator_residual(*bowl.table());
  const double bres = br.sup_abs(0.0, 19.0);
  out.push_back({"bowl_residual", bres <= 1e-6, bres, 1e-6});
  const Field& t = *bowl.table();
  const double h = t.grid(0).h();
  const double curv0 = std::abs(2.0 * (t(1) - t(0)) / (h * h) - 0.5);
  out.push_back({"bowl_tip_curvature", curv0 <= 1e-6, curv0, 1e-6});
  const PlateauReport p = bowl_asymptotic_check(bowl, 2, {}, std::array<double, 2>{10.0, 20.0});
  out.push_back({"bowl_plateau_variation", p.total_variation <= 1e-2, p.total_variation, 1e-2});
}

}  // namespace

int run_check_suite(const std::string& suite, std::ostream& os) {
  std::vector<std::pair<std::string, Suite>> suites{
      {"formulas", formulas}, {"operators", operators}, {"profiles", profiles}};
  bool known = suite == "all";
  for (const auto& [n, f] : suites) known = known || n == suite;
  if (!known)
    throw Error(ErrorCode::config_error,
                "unknown check suite '" + suite + "' (formulas, operators, profiles, all)");
  int failures = 0;
  for (const auto& [n, f] : suites) {
    if (suite != "all" && suite != n) continue;
    std::vector<Line> lines;
    f(lines);
    for (const auto& l : lines) {
      os << (l.ok ? "PASS " : "FAIL ") << n << '/' << l.name << " value=" << format_double(l.value)
         << " tol=" << format_double(l.tol) << '\n';
      failures += l.ok ? 0 : 1;
    }
  }
  return failures;
}

}  // namespace mcf
