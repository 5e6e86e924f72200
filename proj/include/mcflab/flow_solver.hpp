#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcflab/grid.hpp"
#include "mcflab/translators.hpp"

namespace mcf {

enum class BoundaryKind {
  /// u(x_b, t) = u0(x_b) + speed * (t - t0), u0 captured when bound.
  translating_dirichlet,
  /// u(x_b, t) = profile(x_b) + offset + speed * (t - t0).
  exact_dirichlet,
  /// Prescribed derivative du/dx_axis on a face (x1-faces of slabs only),
  /// imposed with a reflected ghost node.
  neumann_slope,
  /// Interval faces only: the graph between the face and a vertical
  /// asymptote at `edge` is lumped into the boundary node, which moves with
  /// it. The tangent angle at the asymptote is +-pi/2, so the outgoing flux
  /// atan(u_x) is fixed there and the area under the graph over
  /// (edge_lo, edge_hi) grows at exactly edge_hi - edge_lo.
  tail_flux,
};

const char* to_string(BoundaryKind kind);

struct FacePolicy {
  BoundaryKind kind = BoundaryKind::translating_dirichlet;
  double speed = 1.0;
  double offset = 0.0;
  double slope = 0.0;
  double edge = 0.0;
  std::shared_ptr<const TranslatorProfile> profile;

  static FacePolicy translating(double speed = 1.0);
  static FacePolicy exact(std::shared_ptr<const TranslatorProfile> profile,
                          double speed = 1.0, double offset = 0.0);
  static FacePolicy neumann(double slope);
  static FacePolicy tail(double edge);
};

/// Face numbering: interval {lo, hi}; radial {origin (symmetry, unused),
/// outer}; slab2d {x1_lo, x1_hi, x2_lo, x2_hi}.
namespace face {
inline constexpr int lo = 0;
inline constexpr int hi = 1;
inline constexpr int outer = 1;
inline constexpr int x1_lo = 0;
inline constexpr int x1_hi = 1;
inline constexpr int x2_lo = 2;
inline constexpr int x2_hi = 3;
}  // namespace face

/// One policy per boundary face plus the data captured when bound to an
/// initial field.
class BoundaryPolicy {
 public:
  BoundaryPolicy() = default;

  static BoundaryPolicy all(const FacePolicy& p);
  BoundaryPolicy& set(int face, const FacePolicy& p);
  const FacePolicy& face(int f) const;
  bool is_set(int f) const { return faces_[f].has_value(); }

  /// Validates the assignment against the geometry and captures boundary
  /// samples (initial values or profile values) at time t0.
  BoundaryPolicy bind(const Field& initial, double t0) const;
  bool bound() const noexcept { return bound_; }

  /// Boundary samples captured for face f (empty for Neumann faces).
  const std::vector<double>& captured(int f) const { return captured_[f]; }
  double t0() const noexcept { return t0_; }

 private:
  std::array<std::optional<FacePolicy>, 4> faces_;
  std::array<std::vector<double>, 4> captured_;
  double t0_ = 0.0;
  bool bound_ = false;
};

struct FlowState {
  double t = 0.0;
  Field field;
  BoundaryPolicy policy;
};

/// Binds `policy` to `initial` at time t and validates the pair.
FlowState make_state(Field initial, const BoundaryPolicy& policy, double t = 0.0);

enum class Scheme { explicit_euler };

struct SolverConfig {
  double dt_safety = 0.4;
  double t_end = 1.0;
  int snapshot_stride = 1;
  Scheme scheme = Scheme::explicit_euler;
  /// Multiplies the curvature term. Anything but 1 is a deliberately wrong
  /// PDE used by the harness sensitivity controls.
  double pde_sign = 1.0;

  void validate() const;
};

struct Trajectory {
  std::vector<FlowState> snapshots;
  std::vector<std::int64_t> steps;  // step index of each snapshot
  SolverConfig config;
  bool aborted = false;
  std::int64_t abort_step = -1;
  std::string abort_reason;

  const FlowState& front() const { return snapshots.front(); }
  const FlowState& back() const { return snapshots.back(); }
  std::size_t size() const noexcept { return snapshots.size(); }
};

/// Largest stable explicit step: sigma*h^2/2 on intervals,
/// sigma*h^2/(2n) on radial grids (drift and origin budget),
/// sigma/(2(1/h1^2 + 1/h2^2)) on slabs.
double cfl_dt(const Field& f, double dt_safety = 0.4);

enum class CflCheck { enforce, skip };

/// Explicit monotone update on the interval: conservative flux form
/// u_t = (atan u_x)_x, which equals u_xx/(1 + u_x^2).
FlowState step_interval(const FlowState& s, double dt,
                        CflCheck check = CflCheck::enforce, double pde_sign = 1.0);

/// Radial reduction u_t = u_rr/(1 + u_r^2) + (n-1) u_r / r with
/// u_t(0) = n u_rr(0).
FlowState step_radial(const FlowState& s, double dt,
                      CflCheck check = CflCheck::enforce, double pde_sign = 1.0);

/// Nondivergence form u_t = Delta u - Du.D^2u.Du / (1 + |Du|^2) with the
/// cross derivative taken on the diagonal matching the sign of the
/// coefficient.
FlowState step_slab2d(const FlowState& s, double dt,
                      CflCheck check = CflCheck::enforce, double pde_sign = 1.0);

FlowState step(const FlowState& s, double dt, CflCheck check = CflCheck::enforce,
               double pde_sign = 1.0);

/// Called after every accepted step with the new time and field.
using StepObserver = std::function<void(double t, const Field& f)>;

/// Steps with dt = min(cfl_dt, remaining) until t_end, recording every
/// `snapshot_stride`-th state and the final one. Stops early (aborted) on a
/// non-finite value or |u| > 1e12, keeping the last good snapshot.

Trajectory evolve(const FlowState& initial, const SolverConfig& cfg,
                  const StepObserver& observer = {});

}  // namespace mcf
