#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "mcflab/diagnostics.hpp"
#include "mcflab/error.hpp"

namespace mcf {

using std::numbers::pi;

namespace {

// Trapezoid weights of a uniform grid.
std::vector<double> trap_weights(const Grid1D& g) {
  std::vector<double> w(g.n_nodes(), g.h());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

struct Search {
  const SampleSet* s;
  int dim;  // ambient coordinates actually searched (n + 1)
  std::array<double, 3> lo, hi;
  double t_lo, t_hi;
};

double neg_f(const gsl_vector* p, void* params) {
  const auto* S = static_cast<const Search*>(params);
  std::array<double, 3> x0{};
  for (int a = 0; a < S->dim; ++a) {
    x0[a] = gsl_vector_get(p, a);
    if (x0[a] < S->lo[a] || x0[a] > S->hi[a]) return 1e300;
  }
  const double t = std::exp(gsl_vector_get(p, S->dim));
  if (t < S->t_lo || t > S->t_hi) return 1e300;
  return -f_functional(*S->s, x0, t);
}

}  // namespace

SampleSet curve_samples(const Field& f) {
  require(f.geometry() == Geometry::interval, "curve_samples: interval field required");
  const Field ux = d1(f);
  const Grid1D& g = f.grid(0);
  const auto w = trap_weights(g);
  SampleSet s;
  s.n = 1;
  for (int i = 0; i < g.n_nodes(); ++i) {
    s.x.push_back({g.node(i), f(i), 0.0});
    s.w.push_back(w[i] * std::sqrt(1.0 + ux(i) * ux(i)));
  }
  return s;
}

SampleSet surface_samples(const Field& f) {
  require(f.geometry() == Geometry::slab2d, "surface_samples: slab field required");
  const Field p1 = d1(f, 0), p2 = d1(f, 1);
  const auto w1 = trap_weights(f.grid(0)), w2 = trap_weights(f.grid(1));
  SampleSet s;
  s.n = 2;
  for (int i = 0; i < f.n_nodes(0); ++i)
    for (int j = 0; j < f.n_nodes(1); ++j) {
      s.x.push_back({f.grid(0).node(i), f.grid(1).node(j), f(i, j)});
      const double a = p1(i, j), b = p2(i, j);
      s.w.push_back(w1[i] * w2[j] * std::sqrt(1.0 + a * a + b * b));
    }
  return s;
}

double f_functional(const SampleSet& s, const std::array<double, 3>& x0, double t) {
  require(t > 0.0, "f_functional: t must be positive", ErrorCode::domain_error);
  require(!s.x.empty() && s.x.size() == s.w.size(), "f_functional: degenerate sample set");
  const double norm = std::pow(4.0 * pi * t, -0.5 * s.n);
  const double inv4t = 1.0 / (4.0 * t);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    const double dx = s.x[k][0] - x0[0], dy = s.x[k][1] - x0[1], dz = s.x[k][2] - x0[2];
    sum += s.w[k] * std::exp(-(dx * dx + dy * dy + dz * dz) * inv4t);
  }
  return norm * sum;
}

EntropyResult entropy_estimate(const SampleSet& s) {
  require(s.x.size() >= 3 && s.x.size() == s.w.size() && (s.n == 1 || s.n == 2),
          "entropy_estimate: degenerate sample set");
  Search S;
  S.s = &s;
  S.dim = s.n + 1;
  std::array<double, 3> bmin{0, 0, 0}, bmax{0, 0, 0};
  for (int a = 0; a < S.dim; ++a) {
    bmin[a] = bmax[a] = s.x.front()[a];
    for (const auto& p : s.x) {
      bmin[a] = std::min(bmin[a], p[a]);
      bmax[a] = std::max(bmax[a], p[a]);
    }
  }
  double diam2 = 0.0;
  for (int a = 0; a < S.dim; ++a) diam2 += (bmax[a] - bmin[a]) * (bmax[a] - bmin[a]);
  require(diam2 > 0.0, "entropy_estimate: samples have zero extent");
  const double diam = std::sqrt(diam2);
  for (int a = 0; a < 3; ++a) {
    S.lo[a] = a < S.dim ? bmin[a] - 2.0 * diam : 0.0;
    S.hi[a] = a < S.dim ? bmax[a] + 2.0 * diam : 0.0;
  }
  S.t_lo = 1e-3;
  S.t_hi = 10.0 * diam2;

  // Coarse grid, keeping the best few starts.
  const int G = s.n == 1 ? 17 : 9;
  const int GT = 20;
  struct Cand {
    double val;
    std::array<double, 3> x0;
    double t;
  };
  std::vector<Cand> cands;
  std::array<int, 3> idx{0, 0, 0};
  const int total_x = S.dim == 2 ? G * G : G * G * G;
  for (int c = 0; c < total_x; ++c) {
    idx = {c % G, (c / G) % G, S.dim == 3 ? c / (G * G) : 0};
    std::array<double, 3> x0{};
    for (int a = 0; a < S.dim; ++a) x0[a] = S.lo[a] + (S.hi[a] - S.lo[a]) * idx[a] / (G - 1);
    for (int k = 0; k < GT; ++k) {
      const double t = S.t_lo * std::pow(S.t_hi / S.t_lo, k / double(GT - 1));
      cands.push_back({f_functional(s, x0, t), x0, t});
    }
  }
  const std::size_t keep = std::min<std::size_t>(4, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                    [](const Cand& a, const Cand& b) { return a.val > b.val; });

  EntropyResult best{cands.front().val, cands.front().x0, cands.front().t};
  const int np = S.dim + 1;
  gsl_multimin_function fn{&neg_f, static_cast<std::size_t>(np), &S};
  gsl_vector* x = gsl_vector_alloc(np);
  gsl_vector* step = gsl_vector_alloc(np);
  gsl_multimin_fminimizer* mm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, np);
  for (std::size_t c = 0; c < keep; ++c) {
    for (int a = 0; a < S.dim; ++a) {
      gsl_vector_set(x, a, cands[c].x0[a]);
      gsl_vector_set(step, a, 0.5 * (S.hi[a] - S.lo[a]) / (G - 1));
    }
    gsl_vector_set(x, S.dim, std::log(cands[c].t));
    gsl_vector_set(step, S.dim, 0.5 * std::log(S.t_hi / S.t_lo) / (GT - 1));
    gsl_multimin_fminimizer_set(mm, &fn, x, step);
    for (int it = 0; it < 5000; ++it) {
      if (gsl_multimin_fminimizer_iterate(mm) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mm), 1e-10) == GSL_SUCCESS) break;
    }
    const double val = -gsl_multimin_fminimizer_minimum(mm);
    if (val > best.value) {
      best.value = val;
      const gsl_vector* xm = gsl_multimin_fminimizer_x(mm);
      for (int a = 0; a < S.dim; ++a) best.x0[a] = gsl_vector_get(xm, a);
      best.t = std::exp(gsl_vector_get(xm, S.dim));
    }
  }
  gsl_multimin_fminimizer_free(mm);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

}  // namespace mcf
