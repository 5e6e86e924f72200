#pragma once

#include <string>
#include <vector>

#include "mcflab/flow_solver.hpp"
#include "mcflab/translators.hpp"

namespace mcf {

enum class CheckStatus { pass, fail, inconclusive };

const char* to_string(CheckStatus s);

/// Outcome of a barrier or diagnostic check. `value` is the audited
/// quantity, `slack` its distance to the threshold (negative on failure).
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::inconclusive;
  double value = 0.0;
  double slack = 0.0;
  std::string detail;

  bool passed() const noexcept { return status == CheckStatus::pass; }
};

/// Dimension n of the domain the graph lives over: 1 for intervals, 2 for
/// slabs, radial_dim for radial fields.
int graph_dimension(const Field& f);

/// Onset time and additive constant of the model pancake radius; both are
/// only known to exist, so callers choose them (defaults T0 = 1, C = 0).
struct PancakeConstants {
  double T0 = 1.0;
  double C = 0.0;
};

/// R(n, lambda, T) = pi(2T+T0)/(2 lambda)
///                 + (2(n-1) lambda/pi) ln(pi^2 (2T+T0)/(4 lambda^2))
///                 + 2 lambda C/pi + 1.
double pancake_radius(int n, double lambda, double T, const PancakeConstants& pc = {});

/// Q(n, lambda, T) = pi T/(2 lambda) + (2(n-1) lambda/pi) ln 2 + 1.
double pancake_margin(int n, double lambda, double T);

/// C0 estimate on the truncated domain:
///   sup |u| over K_{r,2 lambda} x [0,T]  <=  sup |u0| over K_{r+R,lambda} + Q
/// with K_{r,l} = [-r, r] x (-b+l, b-l) on slabs and (-b+l, b-l) on
/// intervals. Inconclusive when the grid does not cover K_{r+R,lambda}.
CheckResult c0_estimate_check(const Trajectory& traj, double r, double lambda,
                              double b, const PancakeConstants& pc = {});

/// delta^2 / (4n).
double sphere_window(double eps, double delta, int n);

/// Smallest admissible eps for a given delta at x0: slightly above both the
/// oscillation of the initial field on the delta-ball and delta itself.
double continuity_eps(const Field& initial, double x0, double delta);

/// |u(x0,t) - u0(x0)| < 3 eps for every snapshot with t - t0 within
/// sphere_window. Inconclusive if the initial oscillation on the delta-ball
/// is not below eps, if delta >= eps, or if no snapshot besides the first
/// falls inside the window. x0 is a point on axis 0 (x1 = x0, x2 = 0 on
/// slabs).
CheckResult continuity_check(const Trajectory& traj, double x0, double eps,
                             double delta);

struct SqueezeReport {
  std::vector<double> t;
  std::vector<double> below;  // max of (profile + s t - C0) - u, clamped at 0
  std::vector<double> above;  // max of u - (profile + s t + C0), clamped at 0
  double worst = 0.0;
  double worst_t = 0.0;
  double worst_x1 = 0.0;
  double worst_x2 = 0.0;
};

/// profile + speed (t - t0) - C0 <= u <= profile + speed (t - t0) + C0 at
/// every node where the profile is defined.
SqueezeReport squeeze_check(const Trajectory& traj, const TranslatorProfile& profile,
                            double C0, double speed = 1.0);

/// a <= b at every node of every snapshot. Throws on mismatched grids or
/// snapshot times. `value` is the worst a - b (<= 0 when ordered).
CheckResult avoidance_check(const Trajectory& a, const Trajectory& b);

/// Implied constant C = ln|Du| / (1 + sup_{B(0,mu)}|u0| / mu)^2 at the origin
/// and time mu^2/(4n(1+2n)), clamped below by 0; |Du| is interpolated
/// linearly between the bracketing snapshots. Inconclusive if the ball or
/// the time is not covered.
CheckResult gradient_envelope(const Trajectory& traj, double mu);

}  // namespace mcf
