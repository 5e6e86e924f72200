#include "mcflab/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcflab/error.hpp"

namespace mcf {

namespace {

constexpr double kBlowUp = 1e12;

bool is_dirichlet(BoundaryKind k) {
  return k == BoundaryKind::translating_dirichlet ||
         k == BoundaryKind::exact_dirichlet;
}

// Node coordinates and flat indices along a face.
struct FaceNodes {
  std::vector<std::size_t> index;
  std::vector<double> x1, x2;
};

FaceNodes face_nodes(const Field& f, int fc) {
  FaceNodes out;
  if (f.dims() == 1) {
    const int i = (fc == face::lo) ? 0 : f.n_nodes(0) - 1;
    out.index.push_back(static_cast<std::size_t>(i));
    out.x1.push_back(f.grid(0).node(i));
    out.x2.push_back(0.0);
    return out;
  }
  const int n1 = f.n_nodes(0), n2 = f.n_nodes(1);
  if (fc == face::x1_lo || fc == face::x1_hi) {
    const int i = fc == face::x1_lo ? 0 : n1 - 1;
    for (int j = 0; j < n2; ++j) {
      out.index.push_back(f.index(i, j));
      out.x1.push_back(f.grid(0).node(i));
      out.x2.push_back(f.grid(1).node(j));
    }
  } else {
    const int j = fc == face::x2_lo ? 0 : n2 - 1;
    for (int i = 0; i < n1; ++i) {
      out.index.push_back(f.index(i, j));
      out.x1.push_back(f.grid(0).node(i));
      out.x2.push_back(f.grid(1).node(j));
    }
  }
  return out;
}

[[noreturn]] void abort_run(std::size_t k, double v) {
  std::ostringstream os;
  os << "solver abort: value " << v << " at node " << k;
  fail(ErrorCode::solver_abort, os.str());
}

void check_dt(const Field& f, double dt, CflCheck check) {
  require(dt > 0.0 && std::isfinite(dt), "step: dt must be positive");
  if (check == CflCheck::enforce && dt > cfl_dt(f, 1.0) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step rejected: dt=" << dt << " exceeds the stability bound "
       << cfl_dt(f, 1.0);
    fail(ErrorCode::cfl_violation, os.str());
  }
}

}  // namespace

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::translating_dirichlet: return "translating_dirichlet";
    case BoundaryKind::exact_dirichlet: return "exact_dirichlet";
    case BoundaryKind::neumann_slope: return "neumann_slope";
    case BoundaryKind::tail_flux: return "tail_flux";
  }
  return "unknown";
}

FacePolicy FacePolicy::translating(double speed) {
  FacePolicy p;
  p.kind = BoundaryKind::translating_dirichlet;
  p.speed = speed;
  return p;
}

FacePolicy FacePolicy::exact(std::shared_ptr<const TranslatorProfile> profile,
                             double speed, double offset) {
  require(profile != nullptr, "exact_dirichlet: profile required");
  FacePolicy p;
  p.kind = BoundaryKind::exact_dirichlet;
  p.profile = std::move(profile);
  p.speed = speed;
  p.offset = offset;
  return p;
}

FacePolicy FacePolicy::neumann(double slope) {
  FacePolicy p;
  p.kind = BoundaryKind::neumann_slope;
  p.slope = slope;
  return p;
}

FacePolicy FacePolicy::tail(double edge) {
  FacePolicy p;
  p.kind = BoundaryKind::tail_flux;
  p.edge = edge;
  return p;
}

BoundaryPolicy BoundaryPolicy::all(const FacePolicy& p) {
  BoundaryPolicy b;
  for (auto& f : b.faces_) f = p;
  return b;
}

BoundaryPolicy& BoundaryPolicy::set(int f, const FacePolicy& p) {
  require(f >= 0 && f < 4, "BoundaryPolicy: face out of range");
  faces_[f] = p;
  bound_ = false;
  return *this;
}

const FacePolicy& BoundaryPolicy::face(int f) const {
  require(f >= 0 && f < 4 && faces_[f].has_value(),
          "BoundaryPolicy: face has no policy");
  return *faces_[f];
}

BoundaryPolicy BoundaryPolicy::bind(const Field& initial, double t0) const {
  BoundaryPolicy out = *this;
  out.t0_ = t0;
  std::vector<int> faces;
  switch (initial.geometry()) {
    case Geometry::interval: faces = {face::lo, face::hi}; break;
    case Geometry::radial: faces = {face::outer}; break;
    case Geometry::slab2d:
      faces = {face::x1_lo, face::x1_hi, face::x2_lo, face::x2_hi};
      break;
  }
  for (int fc : faces) {
    require(faces_[fc].has_value(), "BoundaryPolicy: boundary face " +
                                        std::to_string(fc) + " has no policy");
    const FacePolicy& p = *faces_[fc];
    const bool x1_face = initial.geometry() == Geometry::slab2d &&
                         (fc == face::x1_lo || fc == face::x1_hi);
    if (p.kind == BoundaryKind::neumann_slope)
      require(x1_face, "neumann_slope is only allowed on x1-faces of slabs");
    if (p.kind == BoundaryKind::tail_flux)
      require(initial.geometry() == Geometry::interval,
              "tail_flux is only allowed on interval faces");
    const FaceNodes nodes = face_nodes(initial, fc);
    auto& cap = out.captured_[fc];
    cap.clear();
    if (p.kind == BoundaryKind::translating_dirichlet) {
      for (std::size_t k : nodes.index) cap.push_back(initial.values()[k]);
    } else if (p.kind == BoundaryKind::exact_dirichlet) {
      for (std::size_t k = 0; k < nodes.index.size(); ++k)
        cap.push_back(p.profile->value(nodes.x1[k], nodes.x2[k]) + p.offset);
    } else if (p.kind == BoundaryKind::tail_flux) {
      const Grid1D& g = initial.grid(0);
      const bool left = fc == face::lo;
      const double xb = left ? g.lo() : g.hi();
      require(left ? p.edge < xb : p.edge > xb,
              "tail_flux: asymptote must lie beyond the face");
    }
  }
  out.bound_ = true;
  return out;
}

FlowState make_state(Field initial, const BoundaryPolicy& policy, double t) {
  BoundaryPolicy bound = policy.bind(initial, t);
  return FlowState{t, std::move(initial), std::move(bound)};
}

void SolverConfig::validate() const {
  require(dt_safety > 0.0 && dt_safety <= 1.0, "solver: dt_safety must be in (0, 1]",
          ErrorCode::config_error);
  require(std::isfinite(t_end) && t_end >= 0.0, "solver: t_end must be >= 0",
          ErrorCode::config_error);
  require(snapshot_stride >= 1, "solver: snapshot_stride must be >= 1",
          ErrorCode::config_error);
}

double cfl_dt(const Field& f, double dt_safety) {
  switch (f.geometry()) {
    case Geometry::interval: {
      const double h = f.grid(0).h();
      return dt_safety * h * h / 2.0;
    }
    case Geometry::radial: {
      const double h = f.grid(0).h();
      const int n = f.radial_dim();
      // Smallest radius carrying the drift is r = h.
      return dt_safety * h * h / 2.0 / (1.0 + (n - 1) * h / std::max(h, h));
    }
    case Geometry::slab2d: {
      const double h1 = f.grid(0).h(), h2 = f.grid(1).h();
      return dt_safety / (2.0 * (1.0 / (h1 * h1) + 1.0 / (h2 * h2)));
    }
  }
  return 0.0;
}

namespace {

// Everything a step needs that does not change during a run: face node
// lists, Dirichlet samples, Neumann slopes, tail widths, scratch buffers.
class Kernel {
 public:
  Kernel(const Field& layout, const BoundaryPolicy& pol, double pde_sign)
      : f_(layout), pol_(pol), sign_(pde_sign) {
    const int nf = f_.geometry() == Geometry::slab2d ? 4 : 2;
    for (int fc = 0; fc < nf; ++fc) {
      if (f_.geometry() == Geometry::radial && fc != face::outer) continue;
      const FacePolicy& p = pol_.face(fc);
      if (is_dirichlet(p.kind))
        dirichlet_.push_back({face_nodes(f_, fc).index, &pol_.captured(fc), p.speed});
    }
    switch (f_.geometry()) {
      case Geometry::interval:
        flux_.resize(f_.size() - 1);
        for (int fc : {face::lo, face::hi}) {
          const FacePolicy& p = pol_.face(fc);
          if (p.kind != BoundaryKind::tail_flux) continue;
          const Grid1D& g = f_.grid(0);
          const double xb = fc == face::lo ? g.lo() : g.hi();
          tail_width_[fc] = 0.5 * g.h() + std::abs(p.edge - xb);
        }
        break;
      case Geometry::radial:
        require(is_dirichlet(pol_.face(face::outer).kind),
                "step_radial: outer face must be Dirichlet");
        flux_.resize(f_.size() - 1);
        slope_.resize(f_.size() - 1);
        break;
      case Geometry::slab2d:
        for (int fc : {face::x2_lo, face::x2_hi})
          require(is_dirichlet(pol_.face(fc).kind),
                  "step_slab2d: x2-faces must carry a Dirichlet-type policy");
        ghost_.resize(f_.n_nodes(1));
        break;
    }
  }

  // out <- state at t + dt given u at t. u and out must not alias.
  void advance(const double* u, double* out, double t, double dt) {
    switch (f_.geometry()) {
      case Geometry::interval: interval(u, out, dt); break;
      case Geometry::radial: radial(u, out, dt); break;
      case Geometry::slab2d: slab(u, out, dt); break;
    }
    const double elapsed = t + dt - pol_.t0();
    for (const auto& d : dirichlet_) {
      const double shift = d.speed * elapsed;
      for (std::size_t k = 0; k < d.index.size(); ++k)
        out[d.index[k]] = (*d.values)[k] + shift;
    }
    const std::size_t n = f_.size();
    for (std::size_t k = 0; k < n; ++k)
      if (!std::isfinite(out[k]) || std::abs(out[k]) > kBlowUp) abort_run(k, out[k]);
  }

 private:
  struct DirichletFace {
    std::vector<std::size_t> index;
    const std::vector<double>* values;
    double speed;
  };

  void interval(const double* u, double* out, double dt) {
    const int n = f_.n_nodes(0);
    const double h = f_.grid(0).h();
    const double ih = 1.0 / h;
    double* flux = flux_.data();
    for (int k = 0; k < n - 1; ++k) flux[k] = std::atan((u[k + 1] - u[k]) * ih);
    const double c = dt * sign_ * ih;
    for (int i = 1; i < n - 1; ++i) out[i] = u[i] + c * (flux[i] - flux[i - 1]);
    const double half_pi = 0.5 * std::numbers::pi;
    if (tail_width_[face::lo] > 0.0)
      out[0] = u[0] + dt * sign_ * (flux[0] + half_pi) / tail_width_[face::lo];
    if (tail_width_[face::hi] > 0.0)
      out[n - 1] = u[n - 1] + dt * sign_ * (half_pi - flux[n - 2]) / tail_width_[face::hi];
  }

  void radial(const double* u, double* out, double dt) {
    const Grid1D& g = f_.grid(0);
    const int n = g.n_nodes();
    const int dim = f_.radial_dim();
    const double h = g.h();
    for (int k = 0; k < n - 1; ++k) {
      slope_[k] = (u[k + 1] - u[k]) / h;
      flux_[k] = std::atan(slope_[k]);
    }
    out[0] = u[0] + dt * sign_ * 2.0 * dim * (u[1] - u[0]) / (h * h);
    for (int i = 1; i < n - 1; ++i) {
      const double r = g.node(i);
      const double diffusion = (flux_[i] - flux_[i - 1]) / h;
      // Central drift unless it would give the inner neighbour a negative
      // weight; then upwind from the outside.
      const double inner_weight = 1.0 / (1.0 + slope_[i - 1] * slope_[i - 1]) / (h * h);
      const double drift_weight = (dim - 1) / (2.0 * r * h);
      const double ur = inner_weight >= drift_weight ? 0.5 * (slope_[i] + slope_[i - 1])
                                                     : slope_[i];
      out[i] = u[i] + dt * sign_ * (diffusion + (dim - 1) * ur / r);
    }
  }

  void slab(const double* u, double* out, double dt) {
    const int n1 = f_.n_nodes(0), n2 = f_.n_nodes(1);
    const double h1 = f_.grid(0).h(), h2 = f_.grid(1).h();
    const double ih1 = 1.0 / h1, ih2 = 1.0 / h2;
    const double ih11 = ih1 * ih1, ih22 = ih2 * ih2, ih12 = 0.5 * ih1 * ih2;
    const double c = dt * sign_;

    auto update_row = [&](const double* __restrict a, const double* __restrict b,
                          const double* __restrict e, double* __restrict o) {
      for (int j = 1; j < n2 - 1; ++j) {
        const double p1 = 0.5 * (e[j] - a[j]) * ih1;
        const double p2 = 0.5 * (b[j + 1] - b[j - 1]) * ih2;
        const double u11 = (e[j] - 2.0 * b[j] + a[j]) * ih11;
        const double u22 = (b[j + 1] - 2.0 * b[j] + b[j - 1]) * ih22;
        const double den = 1.0 / (1.0 + p1 * p1 + p2 * p2);
        const double a12 = -p1 * p2 * den;
        const double axis = e[j] + a[j] + b[j + 1] + b[j - 1] - 2.0 * b[j];
        const double up = (e[j + 1] + a[j - 1] - axis) * ih12;
        const double down = (axis - e[j - 1] - a[j + 1]) * ih12;
        const double u12 = a12 >= 0.0 ? up : down;
        const double rate =
            (1.0 + p2 * p2) * den * u11 + 2.0 * a12 * u12 + (1.0 + p1 * p1) * den * u22;
        o[j] = b[j] + c * rate;
      }
    };

    for (int i = 1; i < n1 - 1; ++i)
      update_row(u + f_.index(i - 1), u + f_.index(i), u + f_.index(i + 1),
                 out + f_.index(i));

    for (int fc : {face::x1_lo, face::x1_hi}) {
      const FacePolicy& p = pol_.face(fc);
      if (p.kind != BoundaryKind::neumann_slope) continue;
      const bool low = fc == face::x1_lo;
      const int i = low ? 0 : n1 - 1;
      const int inner = low ? 1 : n1 - 2;
      // Reflected ghost row: u_ghost = u_inner -/+ 2 h1 slope.
      const double shift = (low ? -2.0 : 2.0) * h1 * p.slope;
      for (int j = 0; j < n2; ++j) ghost_[j] = u[f_.index(inner, j)] + shift;
      if (low)
        update_row(ghost_.data(), u + f_.index(i), u + f_.index(inner), out + f_.index(i));
      else
        update_row(u + f_.index(inner), u + f_.index(i), ghost_.data(), out + f_.index(i));
    }
  }

  const Field& f_;
  const BoundaryPolicy& pol_;
  double sign_;
  std::vector<DirichletFace> dirichlet_;
  std::array<double, 2> tail_width_{};
  std::vector<double> flux_, slope_, ghost_;
};

FlowState single_step(const FlowState& s, double dt, CflCheck check,
                      double pde_sign) {
  require(s.policy.bound(), "step: boundary policy not bound");
  check_dt(s.field, dt, check);
  Kernel kernel(s.field, s.policy, pde_sign);
  std::vector<double> out(s.field.values().begin(), s.field.values().end());
  kernel.advance(s.field.values().data(), out.data(), s.t, dt);
  return FlowState{s.t + dt, s.field.with_values(std::move(out)), s.policy};
}

}  // namespace

FlowState step_interval(const FlowState& s, double dt, CflCheck check,
                        double pde_sign) {
  require(s.field.geometry() == Geometry::interval,
          "step_interval: interval field required");
  return single_step(s, dt, check, pde_sign);
}

FlowState step_radial(const FlowState& s, double dt, CflCheck check,
                      double pde_sign) {
  require(s.field.geometry() == Geometry::radial, "step_radial: radial field required");
  return single_step(s, dt, check, pde_sign);
}

FlowState step_slab2d(const FlowState& s, double dt, CflCheck check,
                      double pde_sign) {
  require(s.field.geometry() == Geometry::slab2d, "step_slab2d: slab field required");
  return single_step(s, dt, check, pde_sign);
}

FlowState step(const FlowState& s, double dt, CflCheck check, double pde_sign) {
  return single_step(s, dt, check, pde_sign);
}

Trajectory evolve(const FlowState& initial, const SolverConfig& cfg,
                  const StepObserver& observer) {
  cfg.validate();
  require(initial.policy.bound(), "evolve: boundary policy not bound");
  require(cfg.t_end >= initial.t, "evolve: t_end precedes the initial time");
  Trajectory traj;
  traj.config = cfg;
  traj.snapshots.push_back(initial);
  traj.steps.push_back(0);

  Kernel kernel(initial.field, initial.policy, cfg.pde_sign);
  std::vector<double> cur(initial.field.values().begin(), initial.field.values().end());
  std::vector<double> next = cur;
  auto record = [&](double t, std::int64_t k) {
    traj.snapshots.push_back(
        FlowState{t, initial.field.with_values(cur), initial.policy});
    traj.steps.push_back(k);
  };

  const double dt0 = cfl_dt(initial.field, cfg.dt_safety);
  const double tiny = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
  double t = initial.t;
  std::int64_t k = 0;
  bool recorded = true;
  while (cfg.t_end - t > tiny) {
    const double remaining = cfg.t_end - t;
    const bool last = remaining <= dt0 * (1.0 + 1e-9);
    const double dt = last ? remaining : dt0;
    try {
      kernel.advance(cur.data(), next.data(), t, dt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::solver_abort) throw;
      traj.aborted = true;
      traj.abort_step = k + 1;
      traj.abort_reason = e.what();
      break;
    }
    cur.swap(next);
    ++k;
    t = last ? cfg.t_end : t + dt;
    if (observer) observer(t, initial.field.with_values(cur));
    recorded = false;
    if (k % cfg.snapshot_stride == 0 || last) {
      record(t, k);
      recorded = true;
    }
  }
  if (!recorded) record(t, k);  // last good state before an abort
  return traj;
}

}  // namespace mcf
