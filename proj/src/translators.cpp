#include "mcflab/translators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcflab/error.hpp"

namespace mcf {

using std::numbers::pi;

Jet grim_reaper(double x) {
  if (!(std::abs(x) < pi / 2))
    fail(ErrorCode::domain_error, "grim_reaper: |x| must be < pi/2");
  const double c = std::cos(x);
  Jet j;
  j.u = -std::log(c);
  j.u1 = std::tan(x);
  j.u11 = 1.0 / (c * c);
  return j;
}

double tilt_angle(double b) {
  require(b >= pi / 2, "tilt_angle: slab half-width must be >= pi/2",
          ErrorCode::domain_error);
  return std::acos(std::min(1.0, pi / (2.0 * b)));
}

Jet tilted_grim_reaper(double x1, double x2, double b) {
  const double theta = tilt_angle(b);
  if (!(std::abs(x2) < b))
    fail(ErrorCode::domain_error, "tilted_grim_reaper: |x2| must be < b");
  const double ct = std::cos(theta);
  const double sec2 = 1.0 / (ct * ct);
  const double arg = x2 * ct;
  const double ca = std::cos(arg);
  Jet j;
  j.u = x1 * std::tan(theta) - sec2 * std::log(ca);
  j.u1 = std::tan(theta);
  // d/dx2 [-ln cos(x2 c)/c^2] = tan(x2 c)/c, second derivative sec^2(x2 c).
  j.u2 = std::tan(arg) / ct;
  j.u22 = 1.0 / (ca * ca);
  return j;
}

double cylinder_radius(int n, int k, double t) {
  require(n >= 2 && k >= 1 && k <= n - 1,
          "cylinder_radius: need n >= 2 and 1 <= k <= n-1");
  require(t < 0.0, "cylinder_radius: t must be negative", ErrorCode::domain_error);
  return std::sqrt(-2.0 * (n - k) * t);
}

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::grim_reaper_1d: return "grim_reaper_1d";
    case ProfileKind::grim_reaper_plane: return "grim_reaper_plane";
    case ProfileKind::tilted_grim_reaper_plane: return "tilted_grim_reaper_plane";
    case ProfileKind::bowl: return "bowl";
    case ProfileKind::cylinder_shrinker: return "cylinder_shrinker";
    case ProfileKind::tabulated: return "tabulated";
  }
  return "unknown";
}

struct TranslatorProfile::SlabDerivatives {
  Field u1, u2, u11, u12, u22;
};

TranslatorProfile TranslatorProfile::grim_reaper_1d() {
  TranslatorProfile p;
  p.kind_ = ProfileKind::grim_reaper_1d;
  p.label_ = "grim_reaper_1d";
  p.n_ = 1;
  p.b_ = pi / 2;
  return p;
}

TranslatorProfile TranslatorProfile::grim_reaper_plane() {
  TranslatorProfile p = tilted_plane(pi / 2);
  p.kind_ = ProfileKind::grim_reaper_plane;
  p.label_ = "grim_reaper_plane";
  return p;
}

TranslatorProfile TranslatorProfile::tilted_plane(double b) {
  TranslatorProfile p;
  p.kind_ = ProfileKind::tilted_grim_reaper_plane;
  p.label_ = "tilted_grim_reaper_plane";
  p.n_ = 2;
  p.b_ = b;
  p.theta_ = tilt_angle(b);
  return p;
}

TranslatorProfile TranslatorProfile::cylinder_shrinker(int n, int k) {
  (void)cylinder_radius(n, k, -1.0);  // validates (n, k)
  TranslatorProfile p;
  p.kind_ = ProfileKind::cylinder_shrinker;
  p.label_ = "cylinder_shrinker";
  p.n_ = n;
  p.k_ = k;
  return p;
}

TranslatorProfile TranslatorProfile::tabulated(std::string label, Field table,
                                               double residual_sup, int n,
                                               double b, double theta) {
  require(std::isfinite(residual_sup) && residual_sup >= 0.0,
          "tabulated profile must carry its achieved residual bound");
  TranslatorProfile p;
  p.kind_ = ProfileKind::tabulated;
  p.label_ = std::move(label);
  p.n_ = n > 0 ? n
               : (table.geometry() == Geometry::slab2d
                      ? 2
                      : (table.geometry() == Geometry::radial ? table.radial_dim()
                                                              : 1));
  if (b > 0.0) p.b_ = b;
  p.theta_ = theta;
  p.residual_sup_ = residual_sup;
  if (table.geometry() == Geometry::slab2d) {
    const Hessian hs = hessian(table);
    p.slab_derivs_ = std::make_shared<const SlabDerivatives>(
        SlabDerivatives{d1(table, 0), d1(table, 1), hs.d11, hs.d12, hs.d22});
  }
  p.table_ = std::make_shared<const Field>(std::move(table));
  return p;
}

TranslatorProfile TranslatorProfile::bowl_table(int n, Field table,
                                                double residual_sup) {
  require(n >= 2, "bowl: graph dimension must be >= 2");
  require(table.geometry() == Geometry::radial && table.radial_dim() == n,
          "bowl: radial table of matching dimension required");
  TranslatorProfile p = tabulated("bowl", std::move(table), residual_sup, n);
  p.kind_ = ProfileKind::bowl;
  return p;
}

int TranslatorProfile::dims() const noexcept {
  switch (kind_) {
    case ProfileKind::grim_reaper_1d:
    case ProfileKind::bowl:
      return 1;
    case ProfileKind::grim_reaper_plane:
    case ProfileKind::tilted_grim_reaper_plane:
      return 2;
    case ProfileKind::cylinder_shrinker:
      return 0;
    case ProfileKind::tabulated:
      return table_->dims();
  }
  return 0;
}

bool TranslatorProfile::in_domain(double x1, double x2) const noexcept {
  switch (kind_) {
    case ProfileKind::grim_reaper_1d:
      return std::abs(x1) < pi / 2;
    case ProfileKind::grim_reaper_plane:
    case ProfileKind::tilted_grim_reaper_plane:
      return std::abs(x2) < *b_;
    case ProfileKind::cylinder_shrinker:
      return false;
    case ProfileKind::bowl:
      return table_->grid(0).contains(std::abs(x1));
    case ProfileKind::tabulated:
      if (table_->geometry() == Geometry::radial)
        return table_->grid(0).contains(std::abs(x1));
      if (table_->geometry() == Geometry::interval)
        return table_->grid(0).contains(x1);
      return table_->grid(0).contains(x1) && table_->grid(1).contains(x2);
  }
  return false;
}

Jet TranslatorProfile::eval(double x1, double x2) const {
  if (!in_domain(x1, x2)) {
    std::ostringstream os;
    os << "eval_profile: point (" << x1 << ", " << x2 << ") outside the "
       << label_ << " domain";
    fail(ErrorCode::domain_error, os.str());
  }
  switch (kind_) {
    case ProfileKind::grim_reaper_1d:
      return grim_reaper(x1);
    case ProfileKind::grim_reaper_plane:
    case ProfileKind::tilted_grim_reaper_plane:
      return tilted_grim_reaper(x1, x2, *b_);
    case ProfileKind::cylinder_shrinker:
      break;
    case ProfileKind::bowl:
    case ProfileKind::tabulated:
      return table_->dims() == 1 ? eval_table_1d(x1) : eval_table_2d(x1, x2);
  }
  fail(ErrorCode::domain_error, "eval_profile: profile has no graph");
}

Jet TranslatorProfile::eval_table_1d(double x) const {
  const Field& t = *table_;
  const Grid1D& g = t.grid(0);
  const bool radial = t.geometry() == Geometry::radial;
  double sign = 1.0;
  if (radial && x < 0.0) {
    x = -x;
    sign = -1.0;
  }
  const int nc = g.n_cells();
  auto value_at = [&](int k) {
    if (radial && k < 0) k = -k;  // even extension
    return t(k);
  };
  int k = static_cast<int>(std::floor((x - g.lo()) / g.h()));
  k = std::clamp(k, 0, nc - 1);
  // Four-node stencil k0..k0+3 with x preferably in the middle cell.
  int k0 = k - 1;
  if (!radial) k0 = std::clamp(k0, 0, nc - 3);
  k0 = std::min(k0, nc - 3);
  const double s = (x - g.node(k0)) / g.h();
  const double f0 = value_at(k0), f1 = value_at(k0 + 1), f2 = value_at(k0 + 2),
               f3 = value_at(k0 + 3);
  const double d1f = f1 - f0;
  const double d2f = f2 - 2.0 * f1 + f0;
  const double d3f = f3 - 3.0 * f2 + 3.0 * f1 - f0;
  const double q2 = s * (s - 1.0);
  const double q3 = q2 * (s - 2.0);
  Jet j;
  j.u = f0 + d1f * s + 0.5 * d2f * q2 + d3f / 6.0 * q3;
  const double dq3 = 3.0 * s * s - 6.0 * s + 2.0;
  j.u1 = (d1f + 0.5 * d2f * (2.0 * s - 1.0) + d3f / 6.0 * dq3) / g.h() * sign;
  j.u11 = (d2f + d3f * (s - 1.0)) / (g.h() * g.h());
  j.err = std::abs(d3f / 6.0 * q3);
  for (int m = 0; m < 4; ++m) {
    const int node = k0 + m;
    if (node >= 0 && x == g.node(node)) {
      j.u = t(node);
      j.err = 0.0;
    }
  }
  return j;
}

Jet TranslatorProfile::eval_table_2d(double x1, double x2) const {
  const SlabDerivatives& d = *slab_derivs_;
  Jet j;
  j.u = linterp(*table_, x1, x2);
  j.u1 = linterp(d.u1, x1, x2);
  j.u2 = linterp(d.u2, x1, x2);
  j.u11 = linterp(d.u11, x1, x2);
  j.u12 = linterp(d.u12, x1, x2);
  j.u22 = linterp(d.u22, x1, x2);
  const double h1 = table_->grid(0).h(), h2 = table_->grid(1).h();
  j.err = 0.125 * (h1 * h1 * std::abs(j.u11) + h2 * h2 * std::abs(j.u22));
  return j;
}

double NodalResidual::sup_abs() const {
  double m = 0.0;
  const auto v = values.values();
  for (std::size_t k = 0; k < v.size(); ++k)
    if (valid[k]) m = std::max(m, std::abs(v[k]));
  return m;
}

double NodalResidual::sup_abs(double lo, double hi) const {
  double m = 0.0;
  const Grid1D& g = values.grid(0);
  const int n2 = values.dims() == 2 ? values.n_nodes(1) : 1;
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double x = g.node(i);
    if (x < lo || x > hi) continue;
    for (int j = 0; j < n2; ++j) {
      const std::size_t k = values.index(i, j);
      if (valid[k]) m = std::max(m, std::abs(values.values()[k]));
    }
  }
  return m;
}

NodalResidual translator_residual(const Field& f) {
  std::vector<double> r(f.size(), 0.0);
  std::vector<std::uint8_t> ok(f.size(), 0);
  if (f.dims() == 1) {
    const Field ux = d1(f), uxx = d2(f);
    const Grid1D& g = f.grid(0);
    const int n = g.n_nodes();
    const bool radial = f.geometry() == Geometry::radial;
    const int dim = f.radial_dim();
    for (int i = radial ? 0 : 1; i < n - 1; ++i) {
      const double p = ux(i);
      double q = uxx(i) / (1.0 + p * p);
      if (radial) q = i == 0 ? dim * uxx(0) : q + (dim - 1) * p / g.node(i);
      r[i] = q - 1.0;
      ok[i] = 1;
    }
  } else {
    const Field p1 = d1(f, 0), p2 = d1(f, 1);
    const Hessian hs = hessian(f);
    const int n1 = f.n_nodes(0), n2 = f.n_nodes(1);
    for (int i = 1; i < n1 - 1; ++i)
      for (int j = 1; j < n2 - 1; ++j) {
        const std::size_t k = f.index(i, j);
        const double a = p1.values()[k], b = p2.values()[k];
        const double q = ((1.0 + b * b) * hs.d11.values()[k] -
                          2.0 * a * b * hs.d12.values()[k] +
                          (1.0 + a * a) * hs.d22.values()[k]) /
                         (1.0 + a * a + b * b);
        r[k] = q - 1.0;
        ok[k] = 1;
      }
  }
  return {f.with_values(std::move(r)), std::move(ok)};
}

namespace {

// Taylor coefficients of the bowl slope p(r) = r * sum_k b_k r^{2k}, obtained
// by matching powers of s = r^2 in p' = (1 + p^2)(1 - (n - 1) p / r).
std::vector<double> bowl_series(int n, int terms) {
  std::vector<double> b(terms, 0.0);
  std::vector<double> q2(terms, 0.0);  // coefficients of q(s)^2
  for (int k = 0; k < terms; ++k) {
    double s = 0.0;
    // B_j = [s q^2]_j = q2[j-1], A_m = delta_m0 - (n-1) b_m.
    for (int j = 1; j <= k; ++j) {
      const double a = (k - j == 0 ? 1.0 : 0.0) - (n - 1) * b[k - j];
      s += q2[j - 1] * a;
    }
    b[k] = ((k == 0 ? 1.0 : 0.0) + s) / (2.0 * k + n);
    double c = 0.0;
    for (int j = 0; j <= k; ++j) c += b[j] * b[k - j];
    q2[k] = c;
  }
  return b;
}

}  // namespace

TranslatorProfile bowl_profile(int n, double r_max, double h,
                               const BowlOptions& opts) {
  require(n >= 2, "bowl_profile: graph dimension must be >= 2");
  require(r_max >= 10.0, "bowl_profile: r_max must be >= 10");
  require(h > 0.0 && h <= 1e-3 * r_max * (1.0 + 1e-12),
          "bowl_profile: need 0 < h <= 1e-3 * r_max");
  const Grid1D grid = Grid1D::with_spacing(0.0, r_max, h);
  const int nodes = grid.n_nodes();
  const int start = std::min(10, nodes - 1);
  const std::vector<double> coef = bowl_series(n, 10);

  std::vector<double> u(nodes), p(nodes);
  for (int i = 0; i <= start; ++i) {
    const double r = grid.node(i), s = r * r;
    double uu = 0.0, pp = 0.0, sk = 1.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
      pp += coef[k] * sk * r;
      uu += coef[k] * sk * s / (2.0 * k + 2.0);
      sk *= s;
    }
    u[i] = uu;
    p[i] = pp;
  }
  auto slope_rate = [n](double r, double pp) {
    return (1.0 + pp * pp) * (1.0 - (n - 1) * pp / r);
  };
  for (int i = start; i < nodes - 1; ++i) {
    const double r = grid.node(i), hh = grid.h();
    const double k1u = p[i], k1p = slope_rate(r, p[i]);
    const double k2u = p[i] + 0.5 * hh * k1p,
                 k2p = slope_rate(r + 0.5 * hh, p[i] + 0.5 * hh * k1p);
    const double k3u = p[i] + 0.5 * hh * k2p,
                 k3p = slope_rate(r + 0.5 * hh, p[i] + 0.5 * hh * k2p);
    const double k4u = p[i] + hh * k3p, k4p = slope_rate(r + hh, p[i] + hh * k3p);
    u[i + 1] = u[i] + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    p[i + 1] = p[i] + hh / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }
  Field table = Field::radial(grid, n, std::move(u));
  const double achieved =
      translator_residual(table).sup_abs(0.0, r_max - opts.certify_margin);
  if (!(achieved <= opts.residual_tol)) {
    std::ostringstream os;
    os << "bowl_profile: step h=" << h << " too coarse, achieved residual "
       << achieved << " > " << opts.residual_tol;
    fail(ErrorCode::not_converged, os.str());
  }
  return TranslatorProfile::bowl_table(n, std::move(table), achieved);
}

Field sample_profile(const TranslatorProfile& p, const Field& like) {
  std::vector<double> v(like.size());
  if (like.dims() == 1) {
    for (int i = 0; i < like.n_nodes(0); ++i)
      v[i] = p.value(like.grid(0).node(i));
  } else {
    for (int i = 0; i < like.n_nodes(0); ++i)
      for (int j = 0; j < like.n_nodes(1); ++j)
        v[like.index(i, j)] =
            p.value(like.grid(0).node(i), like.grid(1).node(j));
  }
  return like.with_values(std::move(v));
}

}  // namespace mcf
