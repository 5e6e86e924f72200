#include "mcflab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "mcflab/error.hpp"

namespace mcf {

using std::numbers::pi;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool interior(const Field& f, int i, int j = 0) {
  const int n0 = f.n_nodes(0);
  const bool lo_ok = f.geometry() == Geometry::radial ? i >= 0 : i >= 1;
  if (!(lo_ok && i <= n0 - 2)) return false;
  if (f.dims() == 1) return true;
  return j >= 1 && j <= f.n_nodes(1) - 2;
}

// Window node lists as (i, j) pairs.
std::vector<std::array<int, 2>> window_nodes(const Field& f, const FitWindow& w) {
  std::vector<std::array<int, 2>> out;
  const Grid1D& g1 = f.grid(0);
  if (f.dims() == 1) {
    for (int i = 0; i < g1.n_nodes(); ++i)
      if (w.contains(g1.node(i))) out.push_back({i, 0});
    return out;
  }
  const Grid1D& g2 = f.grid(1);
  for (int i = 0; i < g1.n_nodes(); ++i)
    for (int j = 0; j < g2.n_nodes(); ++j)
      if (w.contains(g1.node(i), g2.node(j))) out.push_back({i, j});
  return out;
}

}  // namespace

FitWindow FitWindow::interval(double lo, double hi) {
  require(lo < hi, "FitWindow: empty interval");
  FitWindow w;
  w.x1_lo = lo;
  w.x1_hi = hi;
  return w;
}

FitWindow FitWindow::slab(double x1_lo, double x1_hi, double x2_lo, double x2_hi) {
  require(x1_lo < x1_hi && x2_lo < x2_hi, "FitWindow: empty box");
  return FitWindow{x1_lo, x1_hi, x2_lo, x2_hi};
}

bool FitWindow::contains(double x1, double x2) const noexcept {
  const double e1 = 1e-12 * std::max(1.0, std::abs(x1));
  const bool in1 = x1 >= x1_lo - e1 && x1 <= x1_hi + e1;
  if (x2_lo == 0.0 && x2_hi == 0.0) return in1;
  const double e2 = 1e-12 * std::max(1.0, std::abs(x2));
  return in1 && x2 >= x2_lo - e2 && x2 <= x2_hi + e2;
}

void FitWindow::validate(const Field& f) const {
  auto check_axis = [&](const Grid1D& g, double lo, double hi, bool symmetric_lo) {
    const double margin = 5.0 * g.h() * (1.0 - 1e-9);
    const bool lo_ok = symmetric_lo ? lo >= g.lo() : lo >= g.lo() + margin;
    require(lo_ok && hi <= g.hi() - margin,
            "FitWindow: window must stay at least 5 nodes from the boundary");
  };
  check_axis(f.grid(0), x1_lo, x1_hi, f.geometry() == Geometry::radial);
  if (f.dims() == 2) check_axis(f.grid(1), x2_lo, x2_hi, false);
}

// ---- curvature -------------------------------------------------------------

Field curvature_1d(const Field& f) {
  require(f.geometry() == Geometry::interval, "curvature_1d: interval field required");
  const Field ux = d1(f), uxx = d2(f);
  std::vector<double> k(f.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double p = ux(static_cast<int>(i));
    k[i] = uxx(static_cast<int>(i)) / std::pow(1.0 + p * p, 1.5);
  }
  return f.with_values(std::move(k));
}

SurfaceCurvature curvature_2d(const Field& f) {
  std::vector<double> H(f.size()), V(f.size()), A(f.size());
  if (f.geometry() == Geometry::radial) {
    const Field ur = d1(f), urr = d2(f);
    const int m = f.radial_dim();
    const Grid1D& g = f.grid(0);
    for (int i = 0; i < g.n_nodes(); ++i) {
      const double p = ur(i), v = std::sqrt(1.0 + p * p);
      const double k1 = urr(i) / (v * v * v);
      const double k2 = i == 0 ? urr(0) : p / (g.node(i) * v);
      H[i] = k1 + (m - 1) * k2;
      V[i] = v;
      A[i] = std::sqrt(k1 * k1 + (m - 1) * k2 * k2);
    }
  } else {
    require(f.geometry() == Geometry::slab2d, "curvature_2d: slab or radial field required");
    const Field p1 = d1(f, 0), p2 = d1(f, 1);
    const Hessian hs = hessian(f);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double a = p1.values()[k], b = p2.values()[k];
      const double v2 = 1.0 + a * a + b * b;
      const double g11 = 1.0 - a * a / v2, g12 = -a * b / v2, g22 = 1.0 - b * b / v2;
      const double u11 = hs.d11.values()[k], u12 = hs.d12.values()[k],
                   u22 = hs.d22.values()[k];
      const double v = std::sqrt(v2);
      H[k] = (g11 * u11 + 2.0 * g12 * u12 + g22 * u22) / v;
      // |A|^2 = tr((G U)^2) / v^2.
      const double m11 = g11 * u11 + g12 * u12, m12 = g11 * u12 + g12 * u22;
      const double m21 = g12 * u11 + g22 * u12, m22 = g12 * u12 + g22 * u22;
      A[k] = std::sqrt(std::max(0.0, m11 * m11 + 2.0 * m12 * m21 + m22 * m22)) / v;
      V[k] = v;
    }
  }
  return SurfaceCurvature{f.with_values(std::move(H)), f.with_values(std::move(V)),
                          f.with_values(std::move(A))};
}

double total_curvature(const Field& f) {
  require(f.geometry() == Geometry::interval, "total_curvature: interval field required");
  const Field ux = d1(f), uxx = d2(f);
  std::vector<double> dens(f.size());
  for (int i = 0; i < static_cast<int>(f.size()); ++i)
    dens[i] = std::abs(uxx(i)) / (1.0 + ux(i) * ux(i));
  return trapezoid(f.grid(0), dens);
}

double total_curvature_completed(const Field& f) {
  const Field ux = d1(f);
  const int n = static_cast<int>(f.size());
  return total_curvature(f) + (pi / 2 - std::atan(ux(n - 1))) + (std::atan(ux(0)) + pi / 2);
}

MonotonicityReport monotonicity_audit(const std::vector<double>& t,
                                      const std::vector<double>& I, double tol) {
  require(t.size() == I.size(), "monotonicity_audit: size mismatch");
  MonotonicityReport r;
  r.tolerance = tol;
  for (std::size_t k = 1; k < I.size(); ++k) {
    const double inc = I[k] - I[k - 1];
    if (inc > r.worst_increase) {
      r.worst_increase = inc;
      r.worst_t = t[k];
    }
  }
  r.pass = r.worst_increase <= tol;
  return r;
}

MonotonicityReport monotonicity_audit(const Trajectory& traj, bool completed) {
  std::vector<double> t, I;
  for (const auto& s : traj.snapshots) {
    t.push_back(s.t);
    I.push_back(completed ? total_curvature_completed(s.field) : total_curvature(s.field));
  }
  const double h = traj.front().field.grid(0).h();
  return monotonicity_audit(t, I, 10.0 * h * h);
}

// ---- conserved mass and fits -----------------------------------------------

double phi_mass(const Field& f, const TranslatorProfile& profile, double t,
                TailCompletion tails) {
  require(f.geometry() == Geometry::interval, "phi_mass: interval field required");
  const Grid1D& g = f.grid(0);
  std::vector<double> d(f.size());
  for (int i = 0; i < g.n_nodes(); ++i) d[i] = f(i) - t - profile.value(g.node(i));
  double m = trapezoid(g, d);
  if (tails == TailCompletion::asymptotes) {
    require(g.lo() > -pi / 2 && g.hi() < pi / 2,
            "phi_mass: grid must lie inside (-pi/2, pi/2)");
    m += (g.lo() + pi / 2) * d.front() + (pi / 2 - g.hi()) * d.back();
  }
  return m / pi;
}

namespace {

struct Misfit {
  double c0 = 0.0, rms = 0.0, sup = 0.0;
  bool ok = false;
};

Misfit misfit(const Field& f, const TranslatorProfile& p, double t,
              const std::vector<std::array<int, 2>>& nodes, double c1) {
  Misfit m;
  std::vector<double> d;
  d.reserve(nodes.size());
  const Grid1D& g1 = f.grid(0);
  for (const auto& [i, j] : nodes) {
    const double x1 = g1.node(i) + c1;
    const double x2 = f.dims() == 2 ? f.grid(1).node(j) : 0.0;
    if (!p.in_domain(x1, x2)) return m;
    const double u = f.dims() == 2 ? f(i, j) : f(i);
    d.push_back(u - t - p.value(x1, x2));
  }
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double ss = 0.0, sup = 0.0;
  for (double x : d) {
    ss += (x - mean) * (x - mean);
    sup = std::max(sup, std::abs(x - mean));
  }
  m.c0 = mean;
  m.rms = std::sqrt(ss / static_cast<double>(d.size()));
  m.sup = sup;
  m.ok = true;
  return m;
}

}  // namespace

double c1_bracket(double C0, double theta) {
  require(C0 >= 0.0, "c1_bracket: C0 must be >= 0");
  require(theta > 0.0 && theta < pi / 2, "c1_bracket: theta must be in (0, pi/2)");
  return 1.5 * C0 / std::tan(theta);
}

FitResult fit_translation(const Field& f, const TranslatorProfile& profile, double t,
                          const FitWindow& w, const FitOptions& opts) {
  const auto nodes = window_nodes(f, w);
  require(!nodes.empty(), "fit_translation: window contains no nodes");
  FitResult r;
  if (!opts.fit_c1 || opts.c1_half_width <= 0.0) {
    const Misfit m = misfit(f, profile, t, nodes, 0.0);
    require(m.ok, "fit_translation: profile undefined on the window", ErrorCode::domain_error);
    r.c0 = m.c0;
    r.residual = m.rms;
    r.sup_dist = m.sup;
    return r;
  }
  const double W = opts.c1_half_width;
  auto objective = [&](double c1) {
    const Misfit m = misfit(f, profile, t, nodes, c1);
    return m.ok ? m.rms : std::numeric_limits<double>::infinity();
  };
  const int N = std::max(5, opts.coarse_samples);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> c(N);
  for (int k = 0; k < N; ++k) {
    c[k] = -W + 2.0 * W * k / (N - 1);
    const double v = objective(c[k]);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  require(std::isfinite(best_val), "fit_translation: profile undefined for every c1",
          ErrorCode::domain_error);
  const double lo = c[std::max(0, best - 1)], hi = c[std::min(N - 1, best + 1)];
  const auto [c1, val] = boost::math::tools::brent_find_minima(objective, lo, hi, 40);
  const double pick = val <= best_val ? c1 : c[best];
  const Misfit m = misfit(f, profile, t, nodes, pick);
  r.c0 = m.c0;
  r.c1 = pick;
  r.residual = m.rms;
  r.sup_dist = m.sup;
  const double edge_tol = 2.0 * W / (N - 1);
  r.flagged = std::abs(std::abs(pick) - W) < 0.5 * edge_tol;
  return r;
}

double splitting_check(const Field& f, double b, const std::optional<FitWindow>& w) {
  require(f.geometry() == Geometry::slab2d, "splitting_check: slab field required");
  const double tt = std::tan(tilt_angle(b));
  const Field p1 = d1(f, 0);
  double dev = 0.0;
  for (int i = 1; i < f.n_nodes(0) - 1; ++i)
    for (int j = 1; j < f.n_nodes(1) - 1; ++j) {
      if (w && !w->contains(f.grid(0).node(i), f.grid(1).node(j))) continue;
      dev = std::max(dev, std::abs(p1(i, j) - tt));
    }
  return dev;
}

// ---- Harnack -----------------------------------------------------------------

HarnackReport harnack_residual(const Trajectory& traj, double alpha, const FitWindow& w,
                               double tol, double kappa_floor) {
  HarnackReport rep;
  if (traj.size() < 3) return rep;
  const Field& f0 = traj.front().field;
  require(f0.geometry() == Geometry::interval, "harnack_residual: interval trajectory required");
  const auto nodes = window_nodes(f0, w);
  require(!nodes.empty(), "harnack_residual: empty window");

  std::vector<Field> kappa;
  kappa.reserve(traj.size());
  for (const auto& s : traj.snapshots) kappa.push_back(curvature_1d(s.field));

  rep.min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t = traj.snapshots[k].t;
    if (!(t + alpha > 0.0)) continue;
    const double tm = traj.snapshots[k - 1].t, tp = traj.snapshots[k + 1].t;
    const double hm = t - tm, hp = tp - t;
    // Three-point derivative on a possibly uneven stencil.
    auto ddt = [&](double fm, double f0v, double fp) {
      return (hm * hm * fp - hp * hp * fm - (hm * hm - hp * hp) * f0v) /
             (hm * hp * (hm + hp));
    };
    const Field& u = traj.snapshots[k].field;
    const Field ux = d1(u);
    const Field kx = d1(kappa[k]);
    double snap_min = std::numeric_limits<double>::infinity();
    for (const auto& [i, j] : nodes) {
      (void)j;
      const double kap = kappa[k](i);
      if (!(kap > kappa_floor)) {
        rep.status = CheckStatus::inconclusive;
        rep.min_residual = kNaN;
        return rep;
      }
      const double v = std::sqrt(1.0 + ux(i) * ux(i));
      const double ks = kx(i) / v;
      const double kt_x = ddt(kappa[k - 1](i), kap, kappa[k + 1](i));
      const double ut = ddt(traj.snapshots[k - 1].field(i), u(i), traj.snapshots[k + 1].field(i));
      const double kt_normal = kt_x - ut * ux(i) / v * ks;
      const double z = kt_normal - ks * ks / kap + kap / (2.0 * (t + alpha));
      if (z < snap_min) snap_min = z;
      if (z < rep.min_residual) {
        rep.min_residual = z;
        rep.worst_t = t;
        rep.worst_x = f0.grid(0).node(i);
      }
    }
    rep.t.push_back(t);
    rep.per_snap.push_back(snap_min);
  }
  if (rep.t.empty()) {
    rep.min_residual = kNaN;
    return rep;
  }
  rep.status = rep.min_residual >= -tol ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

// ---- profiles and convexity --------------------------------------------------

PlateauReport bowl_asymptotic_check(const TranslatorProfile& profile, int m,
                                    std::optional<double> coeff,
                                    std::optional<std::array<double, 2>> range) {
  const Field* tab = profile.table();
  require(tab != nullptr && tab->geometry() == Geometry::radial,
          "bowl_asymptotic_check: radial table required");
  require(m >= 2, "bowl_asymptotic_check: m must be >= 2");
  const Grid1D& g = tab->grid(0);
  require(g.hi() >= 20.0 - 1e-9, "bowl_asymptotic_check: table shorter than r = 20");
  const double a = coeff.value_or(1.0 / (2.0 * (m - 1)));
  PlateauReport rep;
  rep.r_lo = range ? (*range)[0] : 0.5 * g.hi();
  rep.r_hi = range ? (*range)[1] : g.hi();
  require(rep.r_lo > 0.0 && rep.r_lo < rep.r_hi && rep.r_hi <= g.hi() + 1e-9,
          "bowl_asymptotic_check: bad range");
  double prev = kNaN;
  for (int i = 1; i < g.n_nodes(); ++i) {
    const double r = g.node(i);
    if (r < rep.r_lo - 1e-9 || r > rep.r_hi + 1e-9) continue;
    const double gv = (*tab)(i)-a * r * r + std::log(r);
    if (!std::isnan(prev)) rep.total_variation += std::abs(gv - prev);
    prev = gv;
    rep.plateau = gv;
  }
  return rep;
}

double convexity_check(const Field& f, ConvexityKind kind, const std::optional<FitWindow>& w) {
  auto in_window = [&](int i, int j) {
    if (!w) return true;
    return f.dims() == 2 ? w->contains(f.grid(0).node(i), f.grid(1).node(j))
                         : w->contains(f.grid(0).node(i));
  };
  double margin = std::numeric_limits<double>::infinity();
  if (kind == ConvexityKind::mean) {
    const Field H = f.geometry() == Geometry::interval ? curvature_1d(f) : curvature_2d(f).H;
    for (int i = 0; i < f.n_nodes(0); ++i)
      for (int j = 0; j < (f.dims() == 2 ? f.n_nodes(1) : 1); ++j)
        if (interior(f, i, j) && in_window(i, j))
          margin = std::min(margin, f.dims() == 2 ? H(i, j) : H(i));
    return margin;
  }
  switch (f.geometry()) {
    case Geometry::interval: {
      const Field uxx = d2(f);
      for (int i = 1; i < f.n_nodes(0) - 1; ++i)
        if (in_window(i, 0)) margin = std::min(margin, uxx(i));
      break;
    }
    case Geometry::radial: {
      const Field ur = d1(f), urr = d2(f);
      for (int i = 0; i < f.n_nodes(0) - 1; ++i) {
        if (!in_window(i, 0)) continue;
        const double lam2 = i == 0 ? urr(0) : ur(i) / f.grid(0).node(i);
        margin = std::min({margin, urr(i), lam2});
      }
      break;
    }
    case Geometry::slab2d: {
      const Hessian hs = hessian(f);
      for (int i = 1; i < f.n_nodes(0) - 1; ++i)
        for (int j = 1; j < f.n_nodes(1) - 1; ++j) {
          if (!in_window(i, j)) continue;
          const double a = hs.d11(i, j), b = hs.d12(i, j), c = hs.d22(i, j);
          const double lam = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
          margin = std::min(margin, lam);
        }
      break;
    }
  }
  return margin;
}

}  // namespace mcf
