#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mcflab/barriers.hpp"
#include "mcflab/flow_solver.hpp"
#include "mcflab/translators.hpp"

namespace mcf {

/// Per-snapshot scalars. Absent entries are NaN.
struct DiagnosticsRecord {
  double t = 0.0;
  double sup_dist = 0.0;  // post-fit sup distance on the fit window
  double I_total = 0.0;
  double sup_kappa = 0.0;
  double phi = 0.0;
  double c0_fit = 0.0;
  double c1_fit = 0.0;
  double fit_residual = 0.0;
  double harnack_min = 0.0;
  double entropy = 0.0;
  double convexity_margin = 0.0;
  double squeeze_violation = 0.0;
};

/// Interior box on which fits and sup-distances are evaluated. On one-axis
/// fields only [x1_lo, x1_hi] is used.
struct FitWindow {
  double x1_lo = 0.0, x1_hi = 0.0;
  double x2_lo = 0.0, x2_hi = 0.0;

  static FitWindow interval(double lo, double hi);
  static FitWindow slab(double x1_lo, double x1_hi, double x2_lo, double x2_hi);

  bool contains(double x1, double x2 = 0.0) const noexcept;
  /// Requires at least 5 nodes between the window and every grid boundary
  /// (r = 0 on radial grids is a symmetry point, not a boundary).
  void validate(const Field& f) const;
};

// ---- curvature -------------------------------------------------------------

/// kappa = u_xx / (1 + u_x^2)^{3/2} on interval fields.
Field curvature_1d(const Field& f);

/// Mean curvature H = div(Du/v), the area element v = sqrt(1 + |Du|^2) and the
/// second fundamental form norm |A| for slab and radial graphs.
struct SurfaceCurvature {
  Field H;
  Field v;
  Field A_norm;
};
SurfaceCurvature curvature_2d(const Field& f);

/// Trapezoid quadrature of |u_xx| / (1 + u_x^2) over the grid.
double total_curvature(const Field& f);

/// total_curvature plus the turning of convex tails that reach vertical
/// asymptotes beyond both faces: (pi/2 - atan u_x(hi)) + (atan u_x(lo) + pi/2).
double total_curvature_completed(const Field& f);

struct MonotonicityReport {
  double worst_increase = 0.0;  // max over consecutive samples, >= 0
  double worst_t = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Worst I(t_{k+1}) - I(t_k); pass iff it does not exceed tol.
MonotonicityReport monotonicity_audit(const std::vector<double>& t,
                                      const std::vector<double>& I, double tol);
/// Convenience: evaluates total_curvature (or the completed variant) on every
/// snapshot, tolerance 10 h^2.
MonotonicityReport monotonicity_audit(const Trajectory& traj, bool completed);

// ---- conserved mass and fits -----------------------------------------------

enum class TailCompletion { none, asymptotes };

/// (1/pi) times the trapezoid quadrature of u - t - profile over the grid;
/// with asymptotes, the tails out to +-pi/2 carry the boundary value.
double phi_mass(const Field& f, const TranslatorProfile& profile, double t,
                TailCompletion tails = TailCompletion::none);

struct FitOptions {
  bool fit_c1 = false;
  double c1_half_width = 0.0;  // search c1 in [-w, w]
  int coarse_samples = 41;
};

struct FitResult {
  double c0 = 0.0;
  double c1 = 0.0;
  double residual = 0.0;  // RMS of the misfit on the window nodes
  double sup_dist = 0.0;  // max |misfit| on the window nodes
  bool flagged = false;   // c1 minimum at the bracket edge
};

/// Minimizes the window L2 distance between u - t and profile(x1 + c1, x2) + c0.
/// For fixed c1 the optimal c0 is the window mean of the difference; c1 is
/// found by a coarse scan followed by Brent's method.
FitResult fit_translation(const Field& f, const TranslatorProfile& profile, double t,
                          const FitWindow& w, const FitOptions& opts = {});

/// c1 bracket from |c1| tan(theta) + |c0| <= C0 with a 50% margin.
double c1_bracket(double C0, double theta);

/// Max over interior window nodes of |du/dx1 - tan(theta)|, theta = arccos(pi/(2b)).
double splitting_check(const Field& f, double b, const std::optional<FitWindow>& w = {});

// ---- Harnack -----------------------------------------------------------------

struct HarnackReport {
  CheckStatus status = CheckStatus::inconclusive;
  double min_residual = 0.0;
  double worst_t = 0.0;
  double worst_x = 0.0;
  std::vector<double> t;        // snapshots audited
  std::vector<double> per_snap; // min residual at each audited snapshot
};

/// Scalar residual kappa_t - kappa_s^2/kappa + kappa/(2(t + alpha)) on the
/// window, where kappa_t is the normal-time derivative recovered from central
/// differences across snapshots. Requires kappa > kappa_floor on the window.
HarnackReport harnack_residual(const Trajectory& traj, double alpha,
                               const FitWindow& w, double tol = 1e-2,
                               double kappa_floor = 1e-4);

// ---- Gaussian density and entropy ------------------------------------------

/// Points of an n-dimensional sampled submanifold of R^{n+1} with quadrature
/// weights (arc length for curves, area for surfaces).
struct SampleSet {
  int n = 1;
  std::vector<std::array<double, 3>> x;
  std::vector<double> w;
};

SampleSet curve_samples(const Field& f);
SampleSet surface_samples(const Field& f);

/// F_{x0,t} = sum w (4 pi t)^{-n/2} exp(-|x - x0|^2 / (4t)).
double f_functional(const SampleSet& s, const std::array<double, 3>& x0, double t);

struct EntropyResult {
  double value = 0.0;
  std::array<double, 3> x0{};
  double t = 0.0;
};

/// Sup of F over x0 in the bounding box inflated by two diameters and t in
/// [1e-3, 10 diam^2]: coarse grid, then Nelder-Mead refinement.
EntropyResult entropy_estimate(const SampleSet& s);

// ---- profiles and convexity --------------------------------------------------

struct PlateauReport {
  double plateau = 0.0;
  double total_variation = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
};

/// g(r) = u(r) - coeff r^2 + ln r over the outer half of a radial bowl table
/// (coeff defaults to 1/(2(m-1))). [r_lo, r_hi] may narrow the range.
PlateauReport bowl_asymptotic_check(const TranslatorProfile& profile, int m,
                                    std::optional<double> coeff = {},
                                    std::optional<std::array<double, 2>> range = {});

enum class ConvexityKind { full, mean };

/// Interior minimum of u_xx (interval), of the smaller Hessian eigenvalue
/// (slab; min(u_rr, u_r/r) on radial), or of H for the mean variant.
double convexity_check(const Field& f, ConvexityKind kind = ConvexityKind::full,
                       const std::optional<FitWindow>& w = {});

}  // namespace mcf
