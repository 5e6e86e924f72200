#include "mcflab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcflab/error.hpp"

namespace mcf {

Grid1D::Grid1D(double lo, double hi, int n_cells)
    : lo_(lo), hi_(hi), n_cells_(n_cells), h_((hi - lo) / n_cells) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
          "Grid1D: need finite hi > lo");
  require(n_cells >= 8, "Grid1D: need at least 8 cells, got " +
                            std::to_string(n_cells));
}

Grid1D Grid1D::with_spacing(double lo, double hi, double h) {
  require(h > 0.0 && std::isfinite(h), "Grid1D: spacing must be positive");
  const double cells = (hi - lo) / h;
  const double n = std::round(cells);
  require(std::abs(cells - n) <= 1e-9 * std::max(1.0, cells),
          "Grid1D: interval length is not a multiple of h");
  return Grid1D(lo, hi, static_cast<int>(n));
}

Field::Field(Geometry g, Grid1D g1, Grid1D g2, int radial_dim,
             std::vector<double> values)
    : geometry_(g),
      g1_(g1),
      g2_(g2),
      radial_dim_(radial_dim),
      stride_(g == Geometry::slab2d ? static_cast<std::size_t>(g2.n_nodes())
                                    : 1),
      values_(std::move(values)) {
  std::size_t expected = static_cast<std::size_t>(g1_.n_nodes());
  if (g == Geometry::slab2d) expected *= g2_.n_nodes();
  require(values_.size() == expected, "Field: value count does not match grid");
  for (double v : values_)
    require(std::isfinite(v), "Field: non-finite sample", ErrorCode::domain_error);
}

Field Field::interval(const Grid1D& grid, std::vector<double> values) {
  return Field(Geometry::interval, grid, grid, 0, std::move(values));
}

Field Field::radial(const Grid1D& grid, int radial_dim,
                    std::vector<double> values) {
  require(grid.lo() == 0.0, "Field: radial grid must start at r = 0");
  require(radial_dim >= 1, "Field: radial dimension must be >= 1");
  return Field(Geometry::radial, grid, grid, radial_dim, std::move(values));
}

Field Field::slab(const Grid1D& x1, const Grid1D& x2,
                  std::vector<double> values) {
  return Field(Geometry::slab2d, x1, x2, 0, std::move(values));
}

const Grid1D& Field::grid(int axis) const {
  require(axis == 0 || (axis == 1 && geometry_ == Geometry::slab2d),
          "Field: axis out of range");
  return axis == 0 ? g1_ : g2_;
}

Field Field::with_values(std::vector<double> values) const {
  return Field(geometry_, g1_, g2_, radial_dim_, std::move(values));
}

bool Field::same_layout(const Field& other) const noexcept {
  return geometry_ == other.geometry_ && g1_ == other.g1_ &&
         (geometry_ != Geometry::slab2d || g2_ == other.g2_) &&
         radial_dim_ == other.radial_dim_;
}

namespace {

// Applies a 1D line operator along `axis` of f. `op` receives a strided view
// of one grid line and writes the result line.
template <class Op>
Field along_axis(const Field& f, int axis, Op&& op) {
  const Grid1D& g = f.grid(axis);
  require(g.n_nodes() >= 3, "derivative: fewer than 3 nodes along axis");
  std::vector<double> out(f.size());
  const auto v = f.values();
  if (f.dims() == 1) {
    op(g, [&](int k) { return v[k]; }, [&](int k, double x) { out[k] = x; });
    return f.with_values(std::move(out));
  }
  const int n1 = f.n_nodes(0), n2 = f.n_nodes(1);
  if (axis == 0) {
    for (int j = 0; j < n2; ++j)
      op(g, [&](int k) { return v[f.index(k, j)]; },
         [&](int k, double x) { out[f.index(k, j)] = x; });
  } else {
    for (int i = 0; i < n1; ++i)
      op(g, [&](int k) { return v[f.index(i, k)]; },
         [&](int k, double x) { out[f.index(i, k)] = x; });
  }
  return f.with_values(std::move(out));
}

}  // namespace

Field d1(const Field& f, int axis) {
  const bool radial = f.geometry() == Geometry::radial;
  return along_axis(f, axis, [radial](const Grid1D& g, auto get, auto put) {
    const int n = g.n_nodes();
    const double inv2h = 0.5 / g.h();
    for (int k = 1; k < n - 1; ++k) put(k, (get(k + 1) - get(k - 1)) * inv2h);
    if (radial)
      put(0, 0.0);
    else
      put(0, (-3.0 * get(0) + 4.0 * get(1) - get(2)) * inv2h);
    put(n - 1, (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) * inv2h);
  });
}

Field d2(const Field& f, int axis) {
  require(f.grid(axis).n_nodes() >= 4, "d2: fewer than 4 nodes along axis");
  const bool radial = f.geometry() == Geometry::radial;
  return along_axis(f, axis, [radial](const Grid1D& g, auto get, auto put) {
    const int n = g.n_nodes();
    const double ih2 = 1.0 / (g.h() * g.h());
    for (int k = 1; k < n - 1; ++k)
      put(k, (get(k + 1) - 2.0 * get(k) + get(k - 1)) * ih2);
    if (radial)
      put(0, 2.0 * (get(1) - get(0)) * ih2);
    else
      put(0, (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3)) * ih2);
    put(n - 1, (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) -
                get(n - 4)) *
                   ih2);
  });
}

Hessian hessian(const Field& f) {
  require(f.geometry() == Geometry::slab2d, "hessian: slab2d field required");
  // Composing first differences gives the centered cross stencil inside.
  return {d2(f, 0), d1(d1(f, 0), 1), d2(f, 1)};
}

Field restrict_field(const Field& f) {
  auto half = [](const Grid1D& g) {
    require(g.n_cells() % 2 == 0, "restrict: odd cell count");
    return Grid1D(g.lo(), g.hi(), g.n_cells() / 2);
  };
  const Grid1D c1 = half(f.grid(0));
  if (f.dims() == 1) {
    std::vector<double> v(c1.n_nodes());
    for (int i = 0; i < c1.n_nodes(); ++i) v[i] = f(2 * i);
    return f.geometry() == Geometry::radial
               ? Field::radial(c1, f.radial_dim(), std::move(v))
               : Field::interval(c1, std::move(v));
  }
  const Grid1D c2 = half(f.grid(1));
  std::vector<double> v(static_cast<std::size_t>(c1.n_nodes()) * c2.n_nodes());
  for (int i = 0; i < c1.n_nodes(); ++i)
    for (int j = 0; j < c2.n_nodes(); ++j)
      v[static_cast<std::size_t>(i) * c2.n_nodes() + j] = f(2 * i, 2 * j);
  return Field::slab(c1, c2, std::move(v));
}

namespace {

// Cell index and local coordinate in [0, 1] of x on g.
std::pair<int, double> locate(const Grid1D& g, double x) {
  if (!g.contains(x))
    fail(ErrorCode::domain_error,
         "linterp: query " + std::to_string(x) + " outside grid");
  int k = static_cast<int>(std::floor((x - g.lo()) / g.h()));
  k = std::clamp(k, 0, g.n_cells() - 1);
  if (x == g.node(k)) return {k, 0.0};
  if (x == g.node(k + 1)) return {k, 1.0};
  return {k, (x - g.node(k)) / g.h()};
}

}  // namespace

double linterp(const Field& f, double x) {
  require(f.dims() == 1, "linterp: one-axis field required");
  const auto [k, s] = locate(f.grid(0), x);
  if (s == 0.0) return f(k);
  if (s == 1.0) return f(k + 1);
  return (1.0 - s) * f(k) + s * f(k + 1);
}

double linterp(const Field& f, double x1, double x2) {
  require(f.dims() == 2, "linterp: slab field required");
  const auto [i, s] = locate(f.grid(0), x1);
  const auto [j, r] = locate(f.grid(1), x2);
  if ((s == 0.0 || s == 1.0) && (r == 0.0 || r == 1.0))
    return f(i + static_cast<int>(s), j + static_cast<int>(r));
  return (1.0 - s) * ((1.0 - r) * f(i, j) + r * f(i, j + 1)) +
         s * ((1.0 - r) * f(i + 1, j) + r * f(i + 1, j + 1));
}

double trapezoid(const Grid1D& grid, std::span<const double> values) {
  require(values.size() == static_cast<std::size_t>(grid.n_nodes()),
          "trapezoid: size mismatch");
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t k = 1; k + 1 < values.size(); ++k) s += values[k];
  return s * grid.h();
}

double trapezoid(const Field& f) {
  require(f.dims() == 1, "trapezoid: one-axis field required");
  return trapezoid(f.grid(0), f.values());
}

}  // namespace mcf
