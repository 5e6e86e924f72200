#include "mcflab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mcflab/error.hpp"
#include "mcflab/profile_io.hpp"

namespace mcf {

using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double spacing(const Field& f) {
  double h = f.grid(0).h();
  if (f.dims() == 2) h = std::max(h, f.grid(1).h());
  return h;
}

bool uses_tail_flux(const ScenarioConfig& cfg) {
  return cfg.kind == ScenarioKind::grim_reaper_1d &&
         (cfg.boundary.empty() || cfg.boundary == "tail_flux");
}

SolverConfig solver_for(const ScenarioConfig& cfg, const Field& initial) {
  SolverConfig sc = cfg.solver;
  if (cfg.snapshot_dt > 0.0) {
    const double dt = cfl_dt(initial, sc.dt_safety);
    sc.snapshot_stride = std::max(1, static_cast<int>(std::lround(cfg.snapshot_dt / dt)));
  }
  return sc;
}

// Continues `traj` from its last snapshot to t_end.
void extend(Trajectory& traj, double t_end, const StepObserver& observer = {}) {
  SolverConfig sc = traj.config;
  sc.t_end = t_end;
  const std::int64_t base = traj.steps.back();
  Trajectory more = evolve(traj.back(), sc, observer);
  for (std::size_t k = 1; k < more.size(); ++k) {
    traj.snapshots.push_back(std::move(more.snapshots[k]));
    traj.steps.push_back(base + more.steps[k]);
  }
  traj.config.t_end = t_end;
  if (more.aborted) {
    traj.aborted = true;
    traj.abort_step = base + more.abort_step;
    traj.abort_reason = more.abort_reason;
  }
}

double profile_theta(const TranslatorProfile& p) {
  if (p.theta() > 0.0) return p.theta();
  if (p.b() && *p.b() > pi / 2) return tilt_angle(*p.b());
  return 0.0;
}

FitOptions fit_options(const ScenarioConfig& cfg, const TranslatorProfile& p) {
  FitOptions o;
  const double th = profile_theta(p);
  if (cfg.diagnostics.fit_c1 && th > 0.0) {
    o.fit_c1 = true;
    o.c1_half_width = c1_bracket(cfg.C0.value_or(0.5), th);
  }
  return o;
}

double window_sup_abs(const Field& f, const Field& values, const FitWindow& w) {
  double s = 0.0;
  const Grid1D& g1 = f.grid(0);
  if (f.dims() == 1) {
    for (int i = 1; i < g1.n_nodes() - 1; ++i)
      if (w.contains(g1.node(i))) s = std::max(s, std::abs(values(i)));
    if (f.geometry() == Geometry::radial && w.contains(0.0)) s = std::max(s, std::abs(values(0)));
    return s;
  }
  const Grid1D& g2 = f.grid(1);
  for (int i = 1; i < g1.n_nodes() - 1; ++i)
    for (int j = 1; j < g2.n_nodes() - 1; ++j)
      if (w.contains(g1.node(i), g2.node(j))) s = std::max(s, std::abs(values(i, j)));
  return s;
}

CheckResult make_check(std::string name, double value, double threshold, bool upper = true,
                       std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.slack = upper ? threshold - value : value - threshold;
  c.status = std::isfinite(value) && c.slack >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
  c.detail = std::move(detail);
  return c;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---- bundle ------------------------------------------------------------------

bool ReportBundle::passed() const noexcept {
  if (aborted) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

int ReportBundle::exit_code() const noexcept {
  if (aborted) return 3;
  return passed() ? 0 : 1;
}

const CheckResult* ReportBundle::check(const std::string& n) const noexcept {
  for (const auto& c : checks)
    if (c.name == n) return &c;
  return nullptr;
}

std::optional<double> ReportBundle::constant(const std::string& n) const noexcept {
  for (const auto& [k, v] : constants)
    if (k == n) return v;
  return std::nullopt;
}

// ---- per-snapshot diagnostics ------------------------------------------------

std::vector<DiagnosticsRecord> snapshot_diagnostics(const ScenarioConfig& cfg,
                                                    const ScenarioSetup& setup,
                                                    const Trajectory& traj) {
  const TranslatorProfile& prof = *setup.profile;
  const FitWindow& w = setup.window;
  const FitOptions fo = fit_options(cfg, prof);
  const bool one_d = traj.front().field.geometry() == Geometry::interval;
  const bool tails = uses_tail_flux(cfg);
  const auto& tg = cfg.diagnostics;

  HarnackReport harnack;
  if (tg.harnack && one_d) harnack = harnack_residual(traj, tg.harnack_alpha, w);
  SqueezeReport squeeze;
  const bool do_squeeze = tg.squeeze && cfg.C0.has_value();
  if (do_squeeze) squeeze = squeeze_check(traj, prof, *cfg.C0);

  std::vector<DiagnosticsRecord> out;
  out.reserve(traj.size());
  std::size_t hk = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const FlowState& s = traj.snapshots[k];
    const Field& f = s.field;
    DiagnosticsRecord r;
    r.t = s.t;
    const FitResult fit = fit_translation(f, prof, s.t, w, fo);
    r.sup_dist = fit.sup_dist;
    r.c0_fit = fit.c0;
    r.c1_fit = fo.fit_c1 ? fit.c1 : 0.0;
    r.fit_residual = fit.residual;
    if (one_d) {
      r.I_total = tails ? total_curvature_completed(f) : total_curvature(f);
      r.sup_kappa = window_sup_abs(f, curvature_1d(f), w);
      r.phi = phi_mass(f, prof, s.t, tails ? TailCompletion::asymptotes : TailCompletion::none);
    } else {
      r.I_total = kNaN;
      r.sup_kappa = window_sup_abs(f, curvature_2d(f).A_norm, w);
      r.phi = kNaN;
    }
    r.harnack_min = kNaN;
    while (hk < harnack.t.size() && harnack.t[hk] < s.t) ++hk;
    if (hk < harnack.t.size() && harnack.t[hk] == s.t) r.harnack_min = harnack.per_snap[hk];
    r.entropy = kNaN;
    r.convexity_margin = tg.convexity ? convexity_check(f, ConvexityKind::full, w) : kNaN;
    r.squeeze_violation =
        do_squeeze ? std::max(squeeze.below[k], squeeze.above[k]) : kNaN;
    out.push_back(r);
  }
  return out;
}

void write_timeseries_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << "t,sup_dist,I_total,sup_kappa,phi,c0_fit,c1_fit,fit_residual,harnack_min,"
        "convexity_margin,squeeze_violation\n";
  auto put = [&](double x) { os << (std::isnan(x) ? std::string("nan") : format_double(x)); };
  for (const auto& r : records) {
    for (double x : {r.t, r.sup_dist, r.I_total, r.sup_kappa, r.phi, r.c0_fit, r.c1_fit,
                     r.fit_residual, r.harnack_min, r.convexity_margin}) {
      put(x);
      os << ',';
    }
    put(r.squeeze_violation);
    os << '\n';
  }
}

// ---- c0 reproduction -----------------------------------------------------------

double residual_rel_change(const std::vector<double>& residual, double fraction) {
  const std::size_t m = residual.size();
  if (m < 3) return std::numeric_limits<double>::infinity();
  const auto k0 = static_cast<std::size_t>(std::floor((1.0 - fraction) * static_cast<double>(m - 1)));
  const double last = residual.back(), first = residual[std::min(k0, m - 2)];
  const double scale = std::max(std::abs(last), std::numeric_limits<double>::min());
  return std::abs(first - last) / scale;
}

namespace {

// Running worst increase of I between consecutive solver steps.
struct StepAudit {
  bool completed = false;
  double prev = 0.0;
  double worst = 0.0;
  double worst_t = 0.0;

  void start(const Field& f) { prev = completed ? total_curvature_completed(f) : total_curvature(f); }
  void operator()(double t, const Field& f) {
    const double I = completed ? total_curvature_completed(f) : total_curvature(f);
    if (I - prev > worst) {
      worst = I - prev;
      worst_t = t;
    }
    prev = I;
  }
};

struct Evolved {
  Trajectory traj;
  std::optional<C0Verdict> verdict;
  std::optional<StepAudit> audit;
};

C0Verdict judge_c0(const ScenarioConfig& cfg, const ScenarioSetup& setup,
                   const Trajectory& traj, const std::vector<double>& residual,
                   const std::vector<double>& c0, const std::vector<double>& phi) {
  C0Verdict v;
  const double h = spacing(setup.initial);
  v.target = phi_mass(setup.initial, *setup.profile, traj.front().t, TailCompletion::asymptotes);
  v.c0_fit = c0.back();
  v.difference = std::abs(v.c0_fit - v.target);
  v.tolerance = std::max(0.02 * std::abs(v.target), 5.0 * h * h);
  for (double p : phi) v.phi_drift = std::max(v.phi_drift, std::abs(p - phi.front()));
  v.phi_tolerance = 10.0 * h * h;
  v.t_final = traj.back().t;
  v.residual_rel_change = residual_rel_change(residual, cfg.quasi_steady.tail_fraction);
  if (traj.aborted) {
    v.status = CheckStatus::fail;
    v.detail = "solver aborted: " + traj.abort_reason;
  } else if (!(v.residual_rel_change < cfg.quasi_steady.rel_change)) {
    v.status = CheckStatus::inconclusive;
    v.detail = "fit not quasi-steady at t = " + fmt(v.t_final) +
               " (relative residual change " + fmt(v.residual_rel_change) +
               "); extend quasi_steady.max_t beyond " + fmt(cfg.quasi_steady.max_t);
  } else {
    const bool ok = v.difference <= v.tolerance && v.phi_drift <= v.phi_tolerance;
    v.status = ok ? CheckStatus::pass : CheckStatus::fail;
    v.detail = "target " + fmt(v.target) + ", fit " + fmt(v.c0_fit) + ", phi drift " +
               fmt(v.phi_drift);
  }
  return v;
}

Evolved evolve_scenario(const ScenarioConfig& cfg, const ScenarioSetup& setup) {
  Evolved e;
  const SolverConfig sc = solver_for(cfg, setup.initial);
  StepObserver observer;
  if (cfg.diagnostics.monotonicity && setup.initial.geometry() == Geometry::interval) {
    e.audit.emplace();
    e.audit->completed = uses_tail_flux(cfg);
    e.audit->start(setup.initial);
    observer = [&a = *e.audit](double t, const Field& f) { a(t, f); };
  }
  e.traj = evolve(make_state(setup.initial, setup.policy), sc, observer);
  if (!cfg.diagnostics.reproduce_c0) return e;

  // Fits are cheap in 1D; keep them incremental while the run is extended.
  std::vector<double> residual, c0, phi;
  auto refresh = [&] {
    for (std::size_t k = residual.size(); k < e.traj.size(); ++k) {
      const FlowState& s = e.traj.snapshots[k];
      const FitResult f = fit_translation(s.field, *setup.profile, s.t, setup.window);
      residual.push_back(f.residual);
      c0.push_back(f.c0);
      phi.push_back(phi_mass(s.field, *setup.profile, s.t, TailCompletion::asymptotes));
    }
  };
  refresh();
  const auto& q = cfg.quasi_steady;
  while (!e.traj.aborted &&
         !(residual_rel_change(residual, q.tail_fraction) < q.rel_change) &&
         e.traj.back().t < q.max_t - 1e-12) {
    extend(e.traj, std::min(q.max_t, e.traj.back().t + q.extend_by), observer);
    refresh();
  }
  e.verdict = judge_c0(cfg, setup, e.traj, residual, c0, phi);
  return e;
}

}  // namespace

C0Verdict reproduce_c0(const ScenarioConfig& cfg_in, Trajectory* traj_out) {
  ScenarioConfig cfg = cfg_in;
  require(cfg.kind == ScenarioKind::grim_reaper_1d, "reproduce_c0: 1D scenario required",
          ErrorCode::config_error);
  cfg.diagnostics.reproduce_c0 = true;
  cfg.validate();
  const ScenarioSetup setup = build_scenario(cfg);
  Evolved e = evolve_scenario(cfg, setup);
  if (traj_out) *traj_out = std::move(e.traj);
  return *e.verdict;
}

// ---- delta-wing extraction -------------------------------------------------------

namespace {

BoundaryPolicy wing_policy(double slope) {
  BoundaryPolicy p = BoundaryPolicy::all(FacePolicy::translating(1.0));
  p.set(face::x1_lo, FacePolicy::neumann(-slope)).set(face::x1_hi, FacePolicy::neumann(slope));
  return p;
}

// sup |u_t - 1| over the interior after a short continuation.
double translation_rate_error(const FlowState& s, double tau) {
  SolverConfig sc;
  sc.t_end = s.t + tau;
  sc.snapshot_stride = std::numeric_limits<int>::max();
  const Trajectory tr = evolve(s, sc);
  const Field& a = s.field;
  const Field& b = tr.back().field;
  const double dt = tr.back().t - s.t;
  double e = 0.0;
  for (int i = 1; i < a.n_nodes(0) - 1; ++i)
    for (int j = 1; j < a.n_nodes(1) - 1; ++j)
      e = std::max(e, std::abs((b(i, j) - a(i, j)) / dt - 1.0));
  return e;
}

Field minus_constant(const Field& f, double c) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x -= c;
  return f.with_values(std::move(v));
}

}  // namespace

WingExtraction extract_delta_wing(double b, const WingOptions& o) {
  require(b > pi / 2, "extract_delta_wing: b must exceed pi/2", ErrorCode::domain_error);
  require(o.delta > 0.0 && o.delta < b && o.L > 0.0, "extract_delta_wing: bad truncation");
  require(o.h_coarse > 0.0 && o.h_fine > 0.0 && o.t_coarse > 0.0 && o.t_fine > 0.0,
          "extract_delta_wing: spacings and run times must be positive");
  const double th = tilt_angle(b), tt = std::tan(th), ct = std::cos(th);
  const double w = b - o.delta;
  const double l = o.seed_width;
  auto seed = [&](double x1, double x2) {
    return tt * std::sqrt(x1 * x1 + l * l) - std::log(std::cos(x2 * ct)) / (ct * ct);
  };

  // Coarse stage from the convex seed.
  const Grid1D c1 = centered_grid(o.L, o.h_coarse), c2 = centered_grid(w, o.h_coarse);
  const Field coarse0 = Field::sample_slab(c1, c2, seed);
  SolverConfig sc;
  sc.t_end = o.t_coarse;
  sc.snapshot_stride = std::numeric_limits<int>::max();
  const Trajectory coarse = evolve(make_state(coarse0, wing_policy(tt)), sc);
  if (coarse.aborted)
    throw Error(ErrorCode::solver_abort, "extract_delta_wing: coarse stage aborted: " + coarse.abort_reason);
  WingExtraction out;
  out.coarse_rate = translation_rate_error(coarse.back(), 0.05);

  // Prolong (nested grids) and finish on the fine grid.
  const Field& cu = coarse.back().field;
  const Grid1D f1(c1.lo(), c1.hi(), c1.n_cells() * static_cast<int>(std::lround(o.h_coarse / o.h_fine)));
  const Grid1D f2(c2.lo(), c2.hi(), c2.n_cells() * static_cast<int>(std::lround(o.h_coarse / o.h_fine)));
  const double tc = coarse.back().t;
  const Field fine0 =
      Field::sample_slab(f1, f2, [&](double a, double c) { return linterp(cu, a, c) - tc; });
  sc.t_end = o.t_fine;
  const Trajectory fine = evolve(make_state(fine0, wing_policy(tt)), sc);
  if (fine.aborted)
    throw Error(ErrorCode::solver_abort, "extract_delta_wing: fine stage aborted: " + fine.abort_reason);
  out.fine_rate = translation_rate_error(fine.back(), 0.02);

  const Field& fu = fine.back().field;
  const int i0 = f1.n_nodes() / 2, j0 = f2.n_nodes() / 2;
  const Field table = minus_constant(fu, fu(i0, j0));

  // Certification on the interior.
  out.interior = FitWindow::slab(-o.L + o.x1_margin, o.L - o.x1_margin, -w + o.x2_margin,
                                 w - o.x2_margin);
  const NodalResidual res = translator_residual(table);
  for (int i = 0; i < table.n_nodes(0); ++i)
    for (int j = 0; j < table.n_nodes(1); ++j) {
      const std::size_t k = table.index(i, j);
      if (res.valid[k] && out.interior.contains(f1.node(i), f2.node(j)))
        out.residual = std::max(out.residual, std::abs(res.values.values()[k]));
    }
  const Field p1 = d1(table, 0);
  double far = 0.0;
  for (int i = 1; i < table.n_nodes(0) - 1; ++i)
    for (int j = 1; j < table.n_nodes(1) - 1; ++j) out.max_slope = std::max(out.max_slope, std::abs(p1(i, j)));
  int cnt = 0;
  for (int j = 0; j < table.n_nodes(1); ++j) {
    if (std::abs(f2.node(j)) > w - o.x2_margin) continue;
    far += 0.5 * (p1(table.n_nodes(0) - 2, j) - p1(1, j));
    ++cnt;
  }
  out.far_slope = far / cnt;
  const int n1 = table.n_nodes(0), n2 = table.n_nodes(1);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      out.symmetry_error = std::max({out.symmetry_error, std::abs(table(i, j) - table(n1 - 1 - i, j)),
                                     std::abs(table(i, j) - table(i, n2 - 1 - j))});
  out.certified = out.residual <= o.residual_tol && out.max_slope <= tt + o.slope_tol;
  out.profile = std::make_shared<const TranslatorProfile>(
      TranslatorProfile::tabulated("delta_wing", table, out.residual, 2, b, th));
  return out;
}

ScenarioConfig wing_scenario(const std::string& table_path, double b, double h,
                             const WingOptions& o) {
  ScenarioConfig c;
  c.name = "delta_wing_stability";
  c.kind = ScenarioKind::slab2d_delta_wing;
  c.geometry.b = b;
  c.geometry.delta = o.delta;
  c.geometry.L = o.L;
  c.geometry.h = h;
  c.profile_path = table_path;
  c.perturbation.kind = PerturbationKind::fourier;
  c.perturbation.amplitude = 0.2;
  c.perturbation.width = 1.0;
  c.perturbation.n_modes = 3;
  c.perturbation.seed = 7;
  c.C0 = 0.2;
  c.solver.t_end = 1.0;
  c.snapshot_dt = 0.1;
  c.diagnostics.fit_c1 = true;
  c.diagnostics.shift_bound = true;
  c.diagnostics.convexity = false;
  c.fit_window = FitWindow::slab(-(o.L - 1.5), o.L - 1.5, -(b - o.delta) + 0.35, (b - o.delta) - 0.35);
  c.validate();
  return c;
}

// ---- run_scenario ----------------------------------------------------------------

namespace {

void write_summary(const ReportBundle& rb, const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["name"] = rb.name;
  j["kind"] = to_string(cfg.kind);
  j["exit_code"] = rb.exit_code();
  j["aborted"] = rb.aborted;
  if (rb.aborted) j["abort_reason"] = rb.abort_reason;
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  j["checks"] = nlohmann::json::array();
  for (const auto& c : rb.checks)
    j["checks"].push_back({{"name", c.name},
                           {"status", to_string(c.status)},
                           {"value", num(c.value)},
                           {"slack", num(c.slack)},
                           {"detail", c.detail}});
  j["constants"] = nlohmann::json::object();
  for (const auto& [k, v] : rb.constants) j["constants"][k] = num(v);
  std::ofstream os(rb.summary_path);
  if (!os) throw Error(ErrorCode::io_error, "cannot write " + rb.summary_path);
  os << j.dump(2) << '\n';
}

void prepare_paths(ReportBundle& rb, const ScenarioConfig& cfg) {
  const std::string dir = cfg.output_dir.empty() ? "out/" + rb.name : cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir + ": " + ec.message());
  rb.csv_path = dir + "/timeseries.csv";
  rb.table_path = dir + "/final_profile.table";
  rb.summary_path = dir + "/summary.json";
  rb.config_path = dir + "/config.yaml";
  std::ofstream(rb.config_path) << dump_scenario(cfg);
}

ReportBundle run_extraction(const ScenarioConfig& cfg, ReportBundle rb) {
  WingOptions o;
  o.L = cfg.geometry.L;
  o.delta = cfg.geometry.delta;
  o.h_fine = cfg.geometry.h;
  o.h_coarse = 2.0 * cfg.geometry.h;
  o.t_fine = cfg.solver.t_end;
  const double b = cfg.geometry.b;
  const double tt = std::tan(tilt_angle(b));
  try {
    const WingExtraction wx = extract_delta_wing(b, o);
    save_profile(rb.table_path, *wx.profile);
    rb.checks.push_back(make_check("wing_residual", wx.residual, o.residual_tol));
    rb.checks.push_back(make_check("wing_slope_bound", wx.max_slope, tt + o.slope_tol));
    rb.checks.push_back(make_check("wing_far_slope", std::abs(wx.far_slope - tt), 1e-2));
    rb.checks.push_back(make_check("wing_symmetry", wx.symmetry_error, 1e-9));
    rb.constants = {{"b", b},
                    {"theta", tilt_angle(b)},
                    {"tan_theta", tt},
                    {"residual", wx.residual},
                    {"max_slope", wx.max_slope},
                    {"far_slope", wx.far_slope},
                    {"coarse_rate_error", wx.coarse_rate},
                    {"fine_rate_error", wx.fine_rate}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::solver_abort) throw;
    rb.aborted = true;
    rb.abort_reason = e.what();
  }
  std::ofstream(rb.csv_path) << "t,sup_dist,I_total,sup_kappa,phi,c0_fit,c1_fit,fit_residual,"
                                "harnack_min,convexity_margin,squeeze_violation\n";
  write_summary(rb, cfg);
  return rb;
}

}  // namespace

ReportBundle run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ReportBundle rb;
  rb.name = cfg.name.empty() ? std::string(to_string(cfg.kind)) : cfg.name;
  prepare_paths(rb, cfg);
  if (cfg.kind == ScenarioKind::delta_wing_extract) return run_extraction(cfg, rb);

  const ScenarioSetup setup = build_scenario(cfg);
  Evolved ev = evolve_scenario(cfg, setup);
  const Trajectory& traj = ev.traj;
  rb.aborted = traj.aborted;
  rb.abort_reason = traj.abort_reason;
  rb.records = snapshot_diagnostics(cfg, setup, traj);

  const auto& tg = cfg.diagnostics;
  const Field& f0 = setup.initial;
  const double h = spacing(f0);
  const double h2 = h * h;
  const bool one_d = f0.geometry() == Geometry::interval;
  const bool tails = uses_tail_flux(cfg);
  const auto& recs = rb.records;
  const TranslatorProfile& prof = *setup.profile;

  if (traj.aborted) {
    CheckResult c;
    c.name = "solver";
    c.status = CheckStatus::fail;
    c.detail = traj.abort_reason;
    rb.checks.push_back(c);
  }
  if (tg.squeeze && cfg.C0) {
    double worst = 0.0;
    for (const auto& r : recs) worst = std::max(worst, r.squeeze_violation);
    rb.checks.push_back(make_check("squeeze", worst, 10.0 * h2));
  }
  if (ev.audit) {
    rb.checks.push_back(make_check("monotonicity", ev.audit->worst, 10.0 * h2, true,
                                   "worst single-step increase at t = " + fmt(ev.audit->worst_t)));
  }
  if (one_d && tails) {
    double drift = 0.0;
    for (const auto& r : recs) drift = std::max(drift, std::abs(r.phi - recs.front().phi));
    rb.checks.push_back(make_check("phi_conservation", drift, 10.0 * h2));
  }
  if (ev.verdict) {
    const C0Verdict& v = *ev.verdict;
    CheckResult c;
    c.name = "c0_reproduction";
    c.status = v.status;
    c.value = v.difference;
    c.slack = v.tolerance - v.difference;
    c.detail = v.detail;
    rb.checks.push_back(c);
    rb.constants.push_back({"c0_target", v.target});
    rb.constants.push_back({"residual_rel_change", v.residual_rel_change});
  }
  if (tg.harnack && one_d) {
    const HarnackReport hr = harnack_residual(traj, tg.harnack_alpha, setup.window);
    CheckResult c;
    c.name = "harnack";
    c.status = hr.status;
    c.value = hr.min_residual;
    c.slack = hr.min_residual + 1e-2;
    c.detail = "alpha = " + fmt(tg.harnack_alpha) + ", worst at t = " + fmt(hr.worst_t) +
               ", x = " + fmt(hr.worst_x);
    rb.checks.push_back(c);
  }
  if (tg.convexity) {
    const double m0 = recs.front().convexity_margin;
    if (m0 > 0.0) {
      double worst = m0;
      for (const auto& r : recs) worst = std::min(worst, r.convexity_margin);
      rb.checks.push_back(make_check("convexity_preserved", worst, -10.0 * h2, false));
    }
  }
  if (tg.splitting) {
    const double b = cfg.geometry.b > 0.0 ? cfg.geometry.b : pi / 2;
    double worst = 0.0;
    for (const auto& s : traj.snapshots) worst = std::max(worst, splitting_check(s.field, b));
    rb.checks.push_back(make_check("splitting", worst, 10.0 * h2));
  }
  if (tg.stability_decay > 0.0) {
    const double first = recs.front().sup_dist, last = recs.back().sup_dist;
    rb.checks.push_back(make_check("stability_decay", last, first / tg.stability_decay, true,
                                   "sup_dist " + fmt(first) + " -> " + fmt(last)));
    const std::size_t half = recs.size() / 2;
    double worst_rise = 0.0;
    for (std::size_t k = half + 1; k < recs.size(); ++k)
      worst_rise = std::max(worst_rise, recs[k].sup_dist - recs[k - 1].sup_dist);
    rb.checks.push_back(make_check("sup_dist_monotone", worst_rise, 0.0));
  }
  if (tg.shift_bound && cfg.C0) {
    const double tt = std::tan(profile_theta(prof));
    double worst = 0.0;
    for (const auto& r : recs) worst = std::max(worst, std::abs(r.c1_fit) * tt + std::abs(r.c0_fit));
    rb.checks.push_back(
        make_check("shift_bound", worst, *cfg.C0 * tg.comparability + 5.0 * h2, true,
                   "comparability factor " + fmt(tg.comparability)));
  }
  if (tg.c0_estimate) {
    const double b = cfg.geometry.b > 0.0 ? cfg.geometry.b : pi / 2;
    rb.checks.push_back(c0_estimate_check(traj, tg.c0_estimate_r, tg.c0_estimate_lambda, b));
  }
  if (tg.continuity) {
    const double x0 = f0.geometry() == Geometry::radial ? 0.0
                                                         : 0.5 * (setup.window.x1_lo + setup.window.x1_hi);
    const double delta = tg.continuity_delta;
    const double eps = continuity_eps(f0, x0, delta);
    SolverConfig sc = cfg.solver;
    sc.snapshot_stride = 1;
    sc.t_end = traj.front().t + 1.05 * sphere_window(eps, delta, graph_dimension(f0));
    const Trajectory early = evolve(make_state(f0, setup.policy, traj.front().t), sc);
    CheckResult c = continuity_check(early, x0, eps, delta);
    c.name = "continuity";
    rb.checks.push_back(c);
    rb.constants.push_back({"continuity_eps", eps});
    rb.constants.push_back({"continuity_delta", delta});
  }
  if (tg.entropy && f0.geometry() != Geometry::radial) {
    auto ent = [&](const Field& f) {
      return entropy_estimate(one_d ? curve_samples(f) : surface_samples(f)).value;
    };
    rb.constants.push_back({"entropy_initial", ent(traj.front().field)});
    rb.constants.push_back({"entropy_final", ent(traj.back().field)});
  }

  const auto& last = recs.back();
  rb.constants.push_back({"h", h});
  rb.constants.push_back({"t_final", traj.back().t});
  rb.constants.push_back({"c0_fit_final", last.c0_fit});
  rb.constants.push_back({"c1_fit_final", last.c1_fit});
  rb.constants.push_back({"sup_dist_initial", recs.front().sup_dist});
  rb.constants.push_back({"sup_dist_final", last.sup_dist});
  // Drift of the fitted constants over the last half of the run.
  const std::size_t half = recs.size() / 2;
  double d0 = 0.0, d1v = 0.0;
  for (std::size_t k = half; k < recs.size(); ++k) {
    d0 = std::max(d0, std::abs(recs[k].c0_fit - last.c0_fit));
    d1v = std::max(d1v, std::abs(recs[k].c1_fit - last.c1_fit));
  }
  rb.constants.push_back({"c0_drift_last_half", d0});
  rb.constants.push_back({"c1_drift_last_half", d1v});

  {
    std::ofstream os(rb.csv_path);
    if (!os) throw Error(ErrorCode::io_error, "cannot write " + rb.csv_path);
    write_timeseries_csv(os, recs);
  }
  std::map<std::string, std::string> header{{"kind", "snapshot"},
                                            {"scenario", rb.name},
                                            {"t", format_double(traj.back().t)}};
  save_table(rb.table_path, traj.back().field, header);
  write_summary(rb, cfg);
  return rb;
}

// ---- boundary insensitivity -------------------------------------------------------

namespace {

Field final_field(const ScenarioConfig& cfg) {
  const ScenarioSetup s = build_scenario(cfg);
  SolverConfig sc = cfg.solver;
  sc.snapshot_stride = std::numeric_limits<int>::max();
  const Trajectory tr = evolve(make_state(s.initial, s.policy), sc);
  if (tr.aborted) throw Error(ErrorCode::solver_abort, "boundary_insensitivity: " + tr.abort_reason);
  return tr.back().field;
}

// sup over the window nodes of `a` of |a - b|, with b sampled at the same
// points (the grids share a lattice).
double window_gap(const Field& a, const Field& b, const FitWindow& w) {
  double gap = 0.0;
  const Grid1D &a1 = a.grid(0), &a2 = a.grid(1), &b1 = b.grid(0), &b2 = b.grid(1);
  for (int i = 0; i < a1.n_nodes(); ++i)
    for (int j = 0; j < a2.n_nodes(); ++j) {
      const double x1 = a1.node(i), x2 = a2.node(j);
      if (!w.contains(x1, x2)) continue;
      const double fi = (x1 - b1.lo()) / b1.h(), fj = (x2 - b2.lo()) / b2.h();
      const long bi = std::lround(fi), bj = std::lround(fj);
      require(std::abs(fi - bi) < 1e-6 && std::abs(fj - bj) < 1e-6,
              "boundary_insensitivity: grids do not share the window nodes");
      gap = std::max(gap, std::abs(a(i, j) - b(static_cast<int>(bi), static_cast<int>(bj))));
    }
  return gap;
}

}  // namespace

BoundarySensitivity boundary_insensitivity(const ScenarioConfig& base, const FitWindow& window,
                                           double factor) {
  require(base.kind == ScenarioKind::slab2d_plane, "boundary_insensitivity: slab2d_plane scenario required",
          ErrorCode::config_error);
  BoundarySensitivity r;
  r.factor = factor;
  const Field u = final_field(base);
  ScenarioConfig c = base;
  c.geometry.delta = 0.5 * base.geometry.delta;
  r.diff_delta = window_gap(u, final_field(c), window);
  c = base;
  c.geometry.L = 1.5 * base.geometry.L;
  r.diff_L = window_gap(u, final_field(c), window);
  c = base;
  c.geometry.h = 0.5 * base.geometry.h;
  r.err_h = window_gap(u, final_field(c), window);
  const bool ok = r.diff_delta <= factor * r.err_h && r.diff_L <= factor * r.err_h;
  r.status = ok ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

// ---- sweeps -----------------------------------------------------------------------

int SweepSummary::exit_code() const noexcept {
  int code = 0;
  for (const auto& r : rows) code = std::max(code, r.exit_code);
  return code;
}

namespace {

int code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::solver_abort: return 3;
    case ErrorCode::config_error:
    case ErrorCode::invalid_argument:
    case ErrorCode::io_error: return 2;
    default: return 1;
  }
}

SweepRow run_row(const ScenarioConfig& cfg, const std::string& source) {
  SweepRow row;
  row.name = cfg.name;
  row.source = source;
  try {
    const ReportBundle rb = run_scenario(cfg);
    row.exit_code = rb.exit_code();
    for (const auto& c : rb.checks) (c.passed() ? row.passed : row.failed)++;
    if (rb.aborted) row.error = rb.abort_reason;
  } catch (const Error& e) {
    row.exit_code = code_for(e);
    row.error = e.what();
  } catch (const std::exception& e) {
    row.exit_code = 1;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepSummary sweep(const std::vector<ScenarioConfig>& configs) {
  std::vector<std::string> dirs;
  for (const auto& c : configs) {
    const std::string d = c.output_dir.empty() ? "out/" + c.name : c.output_dir;
    require(std::find(dirs.begin(), dirs.end(), d) == dirs.end(),
            "sweep: output directory " + d + " is used twice", ErrorCode::config_error);
    dirs.push_back(d);
  }
  SweepSummary s;
  for (const auto& c : configs) s.rows.push_back(run_row(c, c.name));
  return s;
}

SweepSummary sweep_directory(const std::string& dir, const RunOverrides& ov) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(ErrorCode::config_error, "sweep: not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  SweepSummary s;
  std::vector<ScenarioConfig> ok;
  std::vector<std::string> sources;
  for (const auto& f : files) {
    try {
      ScenarioConfig c = load_scenario(f.string());
      apply_overrides(c, ov);
      ok.push_back(std::move(c));
      sources.push_back(f.string());
    } catch (const Error& e) {
      SweepRow row;
      row.name = f.stem().string();
      row.source = f.string();
      row.exit_code = code_for(e);
      row.error = e.what();
      s.rows.push_back(row);
    }
  }
  std::vector<std::string> dirs;
  for (std::size_t k = 0; k < ok.size(); ++k) {
    const std::string d = ok[k].output_dir.empty() ? "out/" + ok[k].name : ok[k].output_dir;
    if (std::find(dirs.begin(), dirs.end(), d) != dirs.end()) {
      SweepRow row;
      row.name = ok[k].name;
      row.source = sources[k];
      row.exit_code = 2;
      row.error = "output directory " + d + " is used twice";
      s.rows.push_back(row);
      continue;
    }
    dirs.push_back(d);
    s.rows.push_back(run_row(ok[k], sources[k]));
  }
  return s;
}

void write_sweep_summary(std::ostream& os, const SweepSummary& s) {
  os << "name,exit_code,passed,failed,source,error\n";
  for (const auto& r : s.rows)
    os << r.name << ',' << r.exit_code << ',' << r.passed << ',' << r.failed << ',' << r.source
       << ",\"" << r.error << "\"\n";
}

// ---- standalone fitting ---------------------------------------------------------

std::vector<TableFit> fit_tables(const std::string& trajectory, const TranslatorProfile& profile,
                                 const std::optional<FitWindow>& window, bool fit_c1,
                                 double c1_half_width) {
  std::vector<std::string> files;
  std::error_code ec;
  if (fs::is_directory(trajectory, ec)) {
    for (const auto& e : fs::directory_iterator(trajectory))
      if (e.is_regular_file() && e.path().extension() == ".table") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(trajectory);
  }
  require(!files.empty(), "fit: no tables found in " + trajectory, ErrorCode::io_error);
  std::vector<TableFit> out;
  for (const auto& path : files) {
    const FieldTable t = load_table(path);
    TableFit tf;
    if (auto it = t.header.find("t"); it != t.header.end()) tf.t = std::stod(it->second);
    const FitWindow w = window.value_or(default_fit_window(t.field));
    w.validate(t.field);
    FitOptions o;
    o.fit_c1 = fit_c1;
    o.c1_half_width = c1_half_width;
    tf.fit = fit_translation(t.field, profile, tf.t, w, o);
    out.push_back(tf);
  }
  std::stable_sort(out.begin(), out.end(), [](const TableFit& a, const TableFit& b) { return a.t < b.t; });
  return out;
}

}  // namespace mcf
