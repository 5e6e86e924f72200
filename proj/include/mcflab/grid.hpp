#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcf {

/// Uniform grid on [lo, hi] with n_cells cells. node(i) = lo + i*h.
class Grid1D {
 public:
  Grid1D(double lo, double hi, int n_cells);

  /// Builds the grid whose spacing is closest to `h`; the interval must be an
  /// integer number of cells to within 1e-9 relative.
  static Grid1D with_spacing(double lo, double hi, double h);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  int n_cells() const noexcept { return n_cells_; }
  int n_nodes() const noexcept { return n_cells_ + 1; }
  double h() const noexcept { return h_; }
  double node(int i) const noexcept { return lo_ + i * h_; }

  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double lo_;
  double hi_;
  int n_cells_;
  double h_;
};

enum class Geometry { interval, slab2d, radial };

/// Graph function sampled on a structured grid.
///
/// interval: one axis over (lo, hi).
/// radial:   one axis over [0, r_max]; `radial_dim` is the dimension n of the
///           domain R^n the graph lives over. Values are treated as the even
///           extension through r = 0.
/// slab2d:   axis 0 is x1 (longitudinal), axis 1 is x2 (transverse).
///           Storage is row-major in x1: index(i, j) = i * n_nodes(1) + j.
///
/// Fields are immutable once built.
class Field {
 public:
  static Field interval(const Grid1D& grid, std::vector<double> values);
  static Field radial(const Grid1D& grid, int radial_dim,
                      std::vector<double> values);
  static Field slab(const Grid1D& x1, const Grid1D& x2,
                    std::vector<double> values);

  template <class F>
  static Field sample_interval(const Grid1D& grid, F&& f) {
    std::vector<double> v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = f(grid.node(i));
    return interval(grid, std::move(v));
  }
  template <class F>
  static Field sample_radial(const Grid1D& grid, int radial_dim, F&& f) {
    std::vector<double> v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = f(grid.node(i));
    return radial(grid, radial_dim, std::move(v));
  }
  template <class F>
  static Field sample_slab(const Grid1D& x1, const Grid1D& x2, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(x1.n_nodes()) *
                          x2.n_nodes());
    for (int i = 0; i < x1.n_nodes(); ++i)
      for (int j = 0; j < x2.n_nodes(); ++j)
        v[static_cast<std::size_t>(i) * x2.n_nodes() + j] =
            f(x1.node(i), x2.node(j));
    return slab(x1, x2, std::move(v));
  }

  Geometry geometry() const noexcept { return geometry_; }
  int dims() const noexcept { return geometry_ == Geometry::slab2d ? 2 : 1; }
  int radial_dim() const noexcept { return radial_dim_; }

  const Grid1D& grid(int axis = 0) const;
  int n_nodes(int axis) const { return grid(axis).n_nodes(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) * stride_ + j;
  }
  double operator()(int i) const noexcept { return values_[i]; }
  double operator()(int i, int j) const noexcept { return values_[index(i, j)]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Same grid and geometry, new samples.
  Field with_values(std::vector<double> values) const;
  bool same_layout(const Field& other) const noexcept;

 private:
  Field(Geometry g, Grid1D g1, Grid1D g2, int radial_dim,
        std::vector<double> values);

  Geometry geometry_;
  Grid1D g1_;
  Grid1D g2_;
  int radial_dim_;
  std::size_t stride_;
  std::vector<double> values_;
};

struct Hessian {
  Field d11;
  Field d12;
  Field d22;
};

/// First derivative along `axis`: second-order central differences inside,
/// second-order one-sided 3-point stencils at boundary nodes. For radial
/// fields d1 vanishes at r = 0 by symmetry.
Field d1(const Field& f, int axis = 0);

/// Second derivative along `axis`: central 3-point inside, 4-point one-sided
/// (second order) at boundary nodes, even extension at r = 0 for radial.
Field d2(const Field& f, int axis = 0);

Hessian hessian(const Field& f);

/// Keeps every other node. Requires even cell counts on every axis.
Field restrict_field(const Field& f);

/// Piecewise-linear interpolation (bilinear on slabs).
double linterp(const Field& f, double x);
double linterp(const Field& f, double x1, double x2);

/// Composite trapezoid rule over the grid of a one-axis field.
double trapezoid(const Field& f);
double trapezoid(const Grid1D& grid, std::span<const double> values);

}  // namespace mcf
