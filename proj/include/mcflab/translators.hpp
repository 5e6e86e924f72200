#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcflab/grid.hpp"

namespace mcf {

/// Value and derivatives of a graph function at a point. For one-axis
/// profiles only u, u1 and u11 are meaningful (u1 = du/dx or du/dr).
struct Jet {
  double u = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double u11 = 0.0;
  double u12 = 0.0;
  double u22 = 0.0;
  /// Interpolation error estimate; zero for closed-form profiles.
  double err = 0.0;
};

/// u = -ln cos x on (-pi/2, pi/2).
Jet grim_reaper(double x);

/// Tilt of the grim reaper plane fitting the slab of half-width b >= pi/2:
/// theta = arccos(pi / (2b)).
double tilt_angle(double b);

/// u = x1 tan(theta) - ln(cos(x2 cos(theta))) / cos^2(theta).
Jet tilted_grim_reaper(double x1, double x2, double b);

/// Radius sqrt(-2(n-k)t) of the shrinking cylinder S^{n-k} x R^k, t < 0.
double cylinder_radius(int n, int k, double t);

enum class ProfileKind {
  grim_reaper_1d,
  grim_reaper_plane,
  tilted_grim_reaper_plane,
  bowl,
  cylinder_shrinker,
  tabulated,
};

const char* to_string(ProfileKind kind);

/// A reference translator. Closed-form kinds evaluate exactly; bowl and
/// tabulated kinds interpolate a sampled table (cubic on one-axis tables,
/// bilinear on slab tables with finite-difference derivatives).
class TranslatorProfile {
 public:
  static TranslatorProfile grim_reaper_1d();
  /// Untilted grim reaper plane over the slab of half-width pi/2.
  static TranslatorProfile grim_reaper_plane();
  static TranslatorProfile tilted_plane(double b);
  static TranslatorProfile cylinder_shrinker(int n, int k);
  /// Wraps a sampled table. `label` names the translator (e.g. "delta_wing").
  static TranslatorProfile tabulated(std::string label, Field table,
                                     double residual_sup, int n = 0,
                                     double b = 0.0, double theta = 0.0);
  /// Registers a radial bowl table (see bowl_profile).
  static TranslatorProfile bowl_table(int n, Field table, double residual_sup);

  ProfileKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::optional<double> b() const noexcept { return b_; }
  double theta() const noexcept { return theta_; }
  double residual_sup() const noexcept { return residual_sup_; }
  const Field* table() const noexcept { return table_.get(); }
  bool closed_form() const noexcept { return table_ == nullptr; }
  /// Number of spatial axes the profile is a function of.
  int dims() const noexcept;

  bool in_domain(double x1, double x2 = 0.0) const noexcept;
  Jet eval(double x1, double x2 = 0.0) const;
  double value(double x1, double x2 = 0.0) const { return eval(x1, x2).u; }

 private:
  struct SlabDerivatives;

  TranslatorProfile() = default;
  Jet eval_table_1d(double x) const;
  Jet eval_table_2d(double x1, double x2) const;

  ProfileKind kind_ = ProfileKind::grim_reaper_1d;
  std::string label_;
  int n_ = 1;
  int k_ = 0;
  std::optional<double> b_;
  double theta_ = 0.0;
  double residual_sup_ = 0.0;
  std::shared_ptr<const Field> table_;
  std::shared_ptr<const SlabDerivatives> slab_derivs_;
};

/// Residual Q(Du, D^2u) - 1 of the translator equation at unit speed, with
/// Q = (delta_ij - D_i u D_j u / (1 + |Du|^2)) D_ij u, or its radial form
/// u''/(1 + u'^2) + (n - 1) u'/r. Boundary nodes are marked unavailable
/// (r = 0 is available on radial fields by symmetry).
struct NodalResidual {
  Field values;                     // zero where unavailable
  std::vector<std::uint8_t> valid;  // 1 where computed

  /// Max |residual| over valid nodes, optionally restricted to the nodes whose
  /// axis-0 coordinate lies in [lo, hi].
  double sup_abs() const;
  double sup_abs(double lo, double hi) const;
};

NodalResidual translator_residual(const Field& f);

struct BowlOptions {
  double residual_tol = 1e-6;
  /// Residual is certified on [0, r_max - margin].
  double certify_margin = 1.0;
};

/// Radial bowl of graph dimension n >= 2, u(0) = 0, tabulated on [0, r_max]
/// with spacing h. Integrates u''/(1+u'^2) + (n-1)u'/r = 1 with classical RK4
/// from a power-series start on [0, 10h]. Throws not_converged (with the
/// achieved residual in the message) when the table misses the tolerance.
TranslatorProfile bowl_profile(int n, double r_max, double h,
                               const BowlOptions& opts = {});

/// Samples a closed-form or tabulated profile on the nodes of `like`.
Field sample_profile(const TranslatorProfile& p, const Field& like);

}  // namespace mcf
