#include "mcflab/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mcflab/error.hpp"

namespace mcf {

using std::numbers::pi;

namespace {

CheckResult make_result(std::string name, CheckStatus st, double value,
                        double slack, std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.status = st;
  r.value = value;
  r.slack = slack;
  r.detail = std::move(detail);
  return r;
}

// Visits (x1, x2, value) for every node of f.
template <class F>
void for_nodes(const Field& f, F&& fn) {
  if (f.dims() == 1) {
    const Grid1D& g = f.grid(0);
    for (int i = 0; i < g.n_nodes(); ++i) fn(g.node(i), 0.0, f(i));
    return;
  }
  const Grid1D& g1 = f.grid(0);
  const Grid1D& g2 = f.grid(1);
  for (int i = 0; i < g1.n_nodes(); ++i)
    for (int j = 0; j < g2.n_nodes(); ++j) fn(g1.node(i), g2.node(j), f(i, j));
}

// Slack for node membership tests, so that sets whose edges sit on nodes
// keep them.
double node_tol(const Field& f) { return 1e-9 * f.grid(0).h(); }

// u(x0) on intervals and radial fields, u(x0, 0) on slabs.
double value_on_axis(const Field& f, double x0) {
  return f.dims() == 2 ? linterp(f, x0, 0.0) : linterp(f, x0);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

int graph_dimension(const Field& f) {
  switch (f.geometry()) {
    case Geometry::interval: return 1;
    case Geometry::slab2d: return 2;
    case Geometry::radial: return f.radial_dim();
  }
  return 1;
}

double pancake_radius(int n, double lambda, double T, const PancakeConstants& pc) {
  require(n >= 1, "pancake_radius: n must be >= 1");
  require(lambda > 0.0, "pancake_radius: lambda must be positive", ErrorCode::domain_error);
  require(T >= 0.0, "pancake_radius: T must be >= 0", ErrorCode::domain_error);
  require(pc.T0 > 0.0, "pancake_radius: T0 must be positive", ErrorCode::domain_error);
  const double s = 2.0 * T + pc.T0;
  const double arg = pi * pi * s / (4.0 * lambda * lambda);
  require(arg > 0.0, "pancake_radius: logarithm argument must be positive",
          ErrorCode::domain_error);
  const double lead = pi * s / (2.0 * lambda);
  const double log_term = 2.0 * (n - 1) * lambda / pi * std::log(arg);
  return lead + log_term + 2.0 * lambda * pc.C / pi + 1.0;
}

double pancake_margin(int n, double lambda, double T) {
  require(n >= 1, "pancake_margin: n must be >= 1");
  require(lambda > 0.0, "pancake_margin: lambda must be positive", ErrorCode::domain_error);
  require(T >= 0.0, "pancake_margin: T must be >= 0", ErrorCode::domain_error);
  return pi * T / (2.0 * lambda) + 2.0 * (n - 1) * lambda / pi * std::log(2.0) + 1.0;
}

CheckResult c0_estimate_check(const Trajectory& traj, double r, double lambda,
                              double b, const PancakeConstants& pc) {
  const std::string name = "c0_estimate";
  require(!traj.snapshots.empty(), "c0_estimate_check: empty trajectory");
  require(r > 0.0 && b > 0.0, "c0_estimate_check: r and b must be positive");
  const Field& u0 = traj.front().field;
  if (u0.geometry() == Geometry::radial)
    return make_result(name, CheckStatus::inconclusive, 0, 0,
                       "radial fields do not carry a slab cross-section");
  if (!(lambda > 0.0 && lambda < 0.5 * std::min(pi / 2, b)))
    return make_result(name, CheckStatus::inconclusive, 0, 0,
                       "lambda outside (0, min(pi/2, b)/2)");
  const int n = graph_dimension(u0);
  const double T = traj.back().t - traj.front().t;
  const double R = pancake_radius(n, lambda, T, pc);
  const double Q = pancake_margin(n, lambda, T);
  const double tol = node_tol(u0);

  // Coverage of K_{r+R, lambda} by the grid.
  const Grid1D& gt = u0.grid(u0.dims() - 1);  // transverse axis
  bool covered = gt.lo() <= -b + lambda + tol && gt.hi() >= b - lambda - tol;
  if (u0.dims() == 2)
    covered = covered && u0.grid(0).lo() <= -(r + R) + tol &&
              u0.grid(0).hi() >= r + R - tol;
  if (!covered)
    return make_result(name, CheckStatus::inconclusive, 0, 0,
                       "grid does not cover K_{r+R,lambda}, R = " + fmt(R));

  auto in_K = [&](double x1, double x2, double rad, double l) {
    const double xt = u0.dims() == 2 ? x2 : x1;
    const bool radial_ok = u0.dims() == 1 || std::abs(x1) <= rad + tol;
    return radial_ok && std::abs(xt) <= b - l + tol;
  };
  double rhs = 0.0;
  for_nodes(u0, [&](double x1, double x2, double v) {
    if (in_K(x1, x2, r + R, lambda)) rhs = std::max(rhs, std::abs(v));
  });
  rhs += Q;
  double lhs = 0.0;
  for (const auto& s : traj.snapshots)
    for_nodes(s.field, [&](double x1, double x2, double v) {
      if (in_K(x1, x2, r, 2.0 * lambda)) lhs = std::max(lhs, std::abs(v));
    });
  const double slack = rhs - lhs;
  return make_result(name, slack >= 0.0 ? CheckStatus::pass : CheckStatus::fail, lhs,
                     slack, "R = " + fmt(R) + ", Q = " + fmt(Q));
}

double sphere_window(double eps, double delta, int n) {
  require(eps > 0.0 && delta > 0.0, "sphere_window: eps and delta must be positive");
  require(n >= 1, "sphere_window: n must be >= 1");
  return delta * delta / (4.0 * n);
}

double continuity_eps(const Field& initial, double x0, double delta) {
  require(delta > 0.0, "continuity_eps: delta must be positive");
  const double c = value_on_axis(initial, x0);
  double osc = 0.0;
  for_nodes(initial, [&](double x1, double x2, double v) {
    if (std::hypot(x1 - x0, x2) < delta) osc = std::max(osc, std::abs(v - c));
  });
  return 1.01 * std::max(osc, delta);
}

CheckResult continuity_check(const Trajectory& traj, double x0, double eps,
                             double delta) {
  const std::string name = "sphere_continuity";
  require(!traj.snapshots.empty(), "continuity_check: empty trajectory");
  const Field& u0 = traj.front().field;
  if (!(delta < eps))
    return make_result(name, CheckStatus::inconclusive, 0, 0, "requires delta < eps");
  if (!u0.grid(0).contains(x0) || (u0.dims() == 2 && !u0.grid(1).contains(0.0)))
    return make_result(name, CheckStatus::inconclusive, 0, 0, "x0 outside the grid");
  const double c = value_on_axis(u0, x0);
  double osc = 0.0;
  for_nodes(u0, [&](double x1, double x2, double v) {
    if (std::hypot(x1 - x0, x2) < delta) osc = std::max(osc, std::abs(v - c));
  });
  if (!(osc < eps))
    return make_result(name, CheckStatus::inconclusive, osc, 0,
                       "initial oscillation on the delta-ball is not below eps");
  const double window = sphere_window(eps, delta, graph_dimension(u0));
  const double t0 = traj.front().t;
  double worst = 0.0;
  int used = 0;
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    if (s.t - t0 > window * (1.0 + 1e-12)) break;
    worst = std::max(worst, std::abs(value_on_axis(s.field, x0) - c));
    ++used;
  }
  if (used == 0)
    return make_result(name, CheckStatus::inconclusive, 0, 0,
                       "no snapshot inside the window " + fmt(window));
  const double slack = 3.0 * eps - worst;
  return make_result(name, slack > 0.0 ? CheckStatus::pass : CheckStatus::fail, worst,
                     slack,
                     "eps = " + fmt(eps) + ", delta = " + fmt(delta) + ", window = " +
                         fmt(window) + ", snapshots = " + std::to_string(used));
}

SqueezeReport squeeze_check(const Trajectory& traj, const TranslatorProfile& profile,
                            double C0, double speed) {
  require(!traj.snapshots.empty(), "squeeze_check: empty trajectory");
  require(C0 >= 0.0, "squeeze_check: C0 must be >= 0");
  const Field& u0 = traj.front().field;
  // Reference profile on the grid, NaN where undefined.
  std::vector<double> ref;
  ref.reserve(u0.size());
  for_nodes(u0, [&](double x1, double x2, double) {
    ref.push_back(profile.in_domain(x1, x2) ? profile.value(x1, x2)
                                            : std::numeric_limits<double>::quiet_NaN());
  });
  SqueezeReport rep;
  const double t0 = traj.front().t;
  for (const auto& s : traj.snapshots) {
    double below = 0.0, above = 0.0;
    std::size_t k = 0;
    const double shift = speed * (s.t - t0);
    for_nodes(s.field, [&](double x1, double x2, double v) {
      const double c = ref[k++];
      if (std::isnan(c)) return;
      const double lo = c + shift - C0 - v;
      const double hi = v - (c + shift + C0);
      const double w = std::max(lo, hi);
      below = std::max(below, lo);
      above = std::max(above, hi);
      if (w > rep.worst) {
        rep.worst = w;
        rep.worst_t = s.t;
        rep.worst_x1 = x1;
        rep.worst_x2 = x2;
      }
    });
    rep.t.push_back(s.t);
    rep.below.push_back(below);
    rep.above.push_back(above);
  }
  return rep;
}

CheckResult avoidance_check(const Trajectory& a, const Trajectory& b) {
  require(a.size() == b.size(), "avoidance_check: snapshot counts differ");
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const FlowState& sa = a.snapshots[k];
    const FlowState& sb = b.snapshots[k];
    require(sa.t == sb.t, "avoidance_check: snapshot times differ");
    require(sa.field.same_layout(sb.field), "avoidance_check: grids differ");
    const auto va = sa.field.values();
    const auto vb = sb.field.values();
    for (std::size_t m = 0; m < va.size(); ++m) {
      const double d = va[m] - vb[m];
      worst = std::max(worst, d);
      if (d > 0.0) ++violations;
    }
  }
  return make_result("avoidance", violations == 0 ? CheckStatus::pass : CheckStatus::fail,
                     worst, -worst, std::to_string(violations) + " ordering violations");
}

CheckResult gradient_envelope(const Trajectory& traj, double mu) {
  const std::string name = "gradient_envelope";
  require(!traj.snapshots.empty(), "gradient_envelope: empty trajectory");
  require(mu > 0.0, "gradient_envelope: mu must be positive");
  const Field& u0 = traj.front().field;
  const int n = graph_dimension(u0);
  const double tau = mu * mu / (4.0 * n * (1.0 + 2.0 * n));
  const double t0 = traj.front().t;

  bool covered = true;
  if (u0.geometry() == Geometry::radial) {
    covered = u0.grid(0).hi() >= mu;
  } else {
    for (int ax = 0; ax < u0.dims(); ++ax)
      covered = covered && u0.grid(ax).lo() <= -mu && u0.grid(ax).hi() >= mu;
  }
  if (!covered)
    return make_result(name, CheckStatus::inconclusive, 0, 0, "ball B(0, mu) not covered");
  if (traj.back().t - t0 < tau * (1.0 - 1e-12))
    return make_result(name, CheckStatus::inconclusive, 0, 0,
                       "trajectory ends before mu^2/(4n(1+2n)) = " + fmt(tau));

  auto grad_at_origin = [&](const Field& f) {
    if (f.geometry() == Geometry::radial) return 0.0;
    const Field g1 = d1(f, 0);
    if (f.dims() == 1) return std::abs(linterp(g1, 0.0));
    const Field g2 = d1(f, 1);
    return std::hypot(linterp(g1, 0.0, 0.0), linterp(g2, 0.0, 0.0));
  };
  // First snapshot at or after tau, blended with its predecessor.
  std::size_t k = 0;
  while (k + 1 < traj.size() && traj.snapshots[k].t - t0 < tau) ++k;
  const FlowState& s1 = traj.snapshots[k];
  const FlowState& s0 = traj.snapshots[k == 0 ? 0 : k - 1];
  double grad = grad_at_origin(s1.field);
  if (k > 0 && s1.t - t0 > tau) {
    const double w = (tau - (s0.t - t0)) / (s1.t - s0.t);
    grad = (1.0 - w) * grad_at_origin(s0.field) + w * grad;
  }

  double sup0 = 0.0;
  for_nodes(u0, [&](double x1, double x2, double v) {
    if (std::hypot(x1, x2) <= mu + node_tol(u0)) sup0 = std::max(sup0, std::abs(v));
  });
  const double scale = (1.0 + sup0 / mu) * (1.0 + sup0 / mu);
  const double C = grad > 0.0 ? std::max(0.0, std::log(grad) / scale) : 0.0;
  return make_result(name, CheckStatus::pass, C, 0.0,
                     "|Du| = " + fmt(grad) + " at t = " + fmt(tau) +
                         ", sup|u0| on B(0,mu) = " + fmt(sup0));
}

}  // namespace mcf
