#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mcflab/error.hpp"
#include "mcflab/experiments.hpp"
#include "mcflab/profile_io.hpp"

namespace mcf {

using std::numbers::pi;

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::grim_reaper_1d: return "grim_reaper_1d";
    case ScenarioKind::slab2d_plane: return "slab2d_plane";
    case ScenarioKind::slab2d_delta_wing: return "slab2d_delta_wing";
    case ScenarioKind::radial_bowl: return "radial_bowl";
    case ScenarioKind::delta_wing_extract: return "delta_wing_extract";
    case ScenarioKind::custom: return "custom";
  }
  return "?";
}

const char* to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::none: return "none";
    case PerturbationKind::bump: return "bump";
    case PerturbationKind::fourier: return "fourier";
  }
  return "?";
}

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
  throw Error(ErrorCode::config_error, "config: " + msg);
}

void config_require(bool cond, const std::string& msg) {
  if (!cond) config_fail(msg);
}

ScenarioKind parse_kind(const std::string& s) {
  for (auto k : {ScenarioKind::grim_reaper_1d, ScenarioKind::slab2d_plane,
                 ScenarioKind::slab2d_delta_wing, ScenarioKind::radial_bowl,
                 ScenarioKind::delta_wing_extract, ScenarioKind::custom})
    if (s == to_string(k)) return k;
  config_fail("unknown kind '" + s + "'");
}

PerturbationKind parse_perturbation_kind(const std::string& s) {
  for (auto k : {PerturbationKind::none, PerturbationKind::bump, PerturbationKind::fourier})
    if (s == to_string(k)) return k;
  config_fail("unknown perturbation type '" + s + "'");
}

// Rejects keys outside `allowed` so that typos do not silently fall back to
// defaults.
void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node) return;
  config_require(node.IsMap(), where + " must be a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    config_require(ok.count(key) > 0, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    config_fail(std::string("bad value for '") + key + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, std::optional<T>& out) {
  if (!node || !node[key]) return;
  T v{};
  read(node, key, v);
  out = v;
}

std::optional<FitWindow> read_window(const YAML::Node& n) {
  if (!n) return std::nullopt;
  std::vector<double> v;
  try {
    v = n.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    config_fail("fit_window must be a list of 2 or 4 numbers");
  }
  if (v.size() == 2 && v[0] < v[1]) return FitWindow::interval(v[0], v[1]);
  if (v.size() == 4 && v[0] < v[1] && v[2] < v[3])
    return FitWindow::slab(v[0], v[1], v[2], v[3]);
  config_fail("fit_window must be [lo, hi] or [x1_lo, x1_hi, x2_lo, x2_hi]");
}

bool is_slab(ScenarioKind k) {
  return k == ScenarioKind::slab2d_plane || k == ScenarioKind::slab2d_delta_wing ||
         k == ScenarioKind::delta_wing_extract;
}

}  // namespace

// ---- parsing -------------------------------------------------------------------

ScenarioConfig parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    config_fail(std::string("YAML parse error: ") + e.what());
  }
  config_require(root.IsMap(), "top level must be a mapping");
  check_keys(root, "scenario",
             {"name", "kind", "geometry", "boundary", "perturbation", "C0", "solver",
              "diagnostics", "fit_window", "quasi_steady", "profile", "initial", "output"});

  ScenarioConfig c;
  read(root, "name", c.name);
  std::string kind;
  read(root, "kind", kind);
  config_require(!kind.empty(), "missing 'kind'");
  c.kind = parse_kind(kind);

  const YAML::Node g = root["geometry"];
  check_keys(g, "geometry", {"b", "delta", "L", "r_max", "h", "n"});
  read(g, "b", c.geometry.b);
  read(g, "delta", c.geometry.delta);
  read(g, "L", c.geometry.L);
  read(g, "r_max", c.geometry.r_max);
  read(g, "h", c.geometry.h);
  read(g, "n", c.geometry.n);

  read(root, "boundary", c.boundary);

  const YAML::Node p = root["perturbation"];
  check_keys(p, "perturbation",
             {"type", "amplitude", "center", "width", "seed", "n_modes", "x1_invariant"});
  if (p) {
    std::string type = "none";
    read(p, "type", type);
    c.perturbation.kind = parse_perturbation_kind(type);
    read(p, "amplitude", c.perturbation.amplitude);
    read(p, "width", c.perturbation.width);
    read(p, "seed", c.perturbation.seed);
    read(p, "n_modes", c.perturbation.n_modes);
    read(p, "x1_invariant", c.perturbation.x1_invariant);
    if (p["center"]) {
      if (p["center"].IsSequence()) {
        std::vector<double> v;
        read(p, "center", v);
        config_require(v.size() == 1 || v.size() == 2, "center must have 1 or 2 entries");
        c.perturbation.center = {v[0], v.size() == 2 ? v[1] : 0.0};
      } else {
        read(p, "center", c.perturbation.center[0]);
      }
    }
  }

  read(root, "C0", c.C0);

  const YAML::Node s = root["solver"];
  check_keys(s, "solver",
             {"t_end", "dt_safety", "snapshot_stride", "snapshot_dt", "pde_sign", "scheme"});
  read(s, "t_end", c.solver.t_end);
  read(s, "dt_safety", c.solver.dt_safety);
  read(s, "snapshot_stride", c.solver.snapshot_stride);
  read(s, "snapshot_dt", c.snapshot_dt);
  read(s, "pde_sign", c.solver.pde_sign);
  if (s && s["scheme"]) {
    std::string scheme;
    read(s, "scheme", scheme);
    config_require(scheme == "explicit_euler", "unknown scheme '" + scheme + "'");
  }

  const YAML::Node d = root["diagnostics"];
  check_keys(d, "diagnostics",
             {"monotonicity", "squeeze", "convexity", "harnack", "harnack_alpha", "entropy",
              "continuity", "continuity_delta", "reproduce_c0", "splitting", "fit_c1",
              "stability_decay", "shift_bound", "comparability", "c0_estimate",
              "c0_estimate_r", "c0_estimate_lambda"});
  auto& t = c.diagnostics;
  read(d, "monotonicity", t.monotonicity);
  read(d, "squeeze", t.squeeze);
  read(d, "convexity", t.convexity);
  read(d, "harnack", t.harnack);
  read(d, "harnack_alpha", t.harnack_alpha);
  read(d, "entropy", t.entropy);
  read(d, "continuity", t.continuity);
  read(d, "continuity_delta", t.continuity_delta);
  read(d, "reproduce_c0", t.reproduce_c0);
  read(d, "splitting", t.splitting);
  read(d, "fit_c1", t.fit_c1);
  read(d, "stability_decay", t.stability_decay);
  read(d, "shift_bound", t.shift_bound);
  read(d, "comparability", t.comparability);
  read(d, "c0_estimate", t.c0_estimate);
  read(d, "c0_estimate_r", t.c0_estimate_r);
  read(d, "c0_estimate_lambda", t.c0_estimate_lambda);

  c.fit_window = read_window(root["fit_window"]);

  const YAML::Node q = root["quasi_steady"];
  check_keys(q, "quasi_steady", {"extend_by", "max_t", "rel_change", "tail_fraction"});
  read(q, "extend_by", c.quasi_steady.extend_by);
  read(q, "max_t", c.quasi_steady.max_t);
  read(q, "rel_change", c.quasi_steady.rel_change);
  read(q, "tail_fraction", c.quasi_steady.tail_fraction);

  read(root, "profile", c.profile_path);
  read(root, "initial", c.initial_path);
  const YAML::Node o = root["output"];
  check_keys(o, "output", {"dir"});
  read(o, "dir", c.output_dir);

  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_scenario(ss.str());
  if (c.name.empty()) {
    const auto slash = path.find_last_of('/');
    std::string stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    c.name = stem.substr(0, stem.find_last_of('.'));
  }
  return c;
}

std::string dump_scenario(const ScenarioConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "kind" << YAML::Value << to_string(c.kind);
  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "b" << YAML::Value << c.geometry.b;
  e << YAML::Key << "delta" << YAML::Value << c.geometry.delta;
  e << YAML::Key << "L" << YAML::Value << c.geometry.L;
  e << YAML::Key << "r_max" << YAML::Value << c.geometry.r_max;
  e << YAML::Key << "h" << YAML::Value << c.geometry.h;
  e << YAML::Key << "n" << YAML::Value << c.geometry.n;
  e << YAML::EndMap;
  if (!c.boundary.empty()) e << YAML::Key << "boundary" << YAML::Value << c.boundary;
  const auto& p = c.perturbation;
  e << YAML::Key << "perturbation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << to_string(p.kind);
  e << YAML::Key << "amplitude" << YAML::Value << p.amplitude;
  e << YAML::Key << "center" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.center[0]
    << p.center[1] << YAML::EndSeq;
  e << YAML::Key << "width" << YAML::Value << p.width;
  e << YAML::Key << "seed" << YAML::Value << p.seed;
  e << YAML::Key << "n_modes" << YAML::Value << p.n_modes;
  e << YAML::Key << "x1_invariant" << YAML::Value << p.x1_invariant;
  e << YAML::EndMap;
  if (c.C0) e << YAML::Key << "C0" << YAML::Value << *c.C0;
  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "t_end" << YAML::Value << c.solver.t_end;
  e << YAML::Key << "dt_safety" << YAML::Value << c.solver.dt_safety;
  e << YAML::Key << "snapshot_stride" << YAML::Value << c.solver.snapshot_stride;
  e << YAML::Key << "snapshot_dt" << YAML::Value << c.snapshot_dt;
  e << YAML::Key << "pde_sign" << YAML::Value << c.solver.pde_sign;
  e << YAML::Key << "scheme" << YAML::Value << "explicit_euler";
  e << YAML::EndMap;
  const auto& t = c.diagnostics;
  e << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "monotonicity" << YAML::Value << t.monotonicity;
  e << YAML::Key << "squeeze" << YAML::Value << t.squeeze;
  e << YAML::Key << "convexity" << YAML::Value << t.convexity;
  e << YAML::Key << "harnack" << YAML::Value << t.harnack;
  e << YAML::Key << "harnack_alpha" << YAML::Value << t.harnack_alpha;
  e << YAML::Key << "entropy" << YAML::Value << t.entropy;
  e << YAML::Key << "continuity" << YAML::Value << t.continuity;
  e << YAML::Key << "continuity_delta" << YAML::Value << t.continuity_delta;
  e << YAML::Key << "reproduce_c0" << YAML::Value << t.reproduce_c0;
  e << YAML::Key << "splitting" << YAML::Value << t.splitting;
  e << YAML::Key << "fit_c1" << YAML::Value << t.fit_c1;
  e << YAML::Key << "stability_decay" << YAML::Value << t.stability_decay;
  e << YAML::Key << "shift_bound" << YAML::Value << t.shift_bound;
  e << YAML::Key << "comparability" << YAML::Value << t.comparability;
  e << YAML::Key << "c0_estimate" << YAML::Value << t.c0_estimate;
  e << YAML::Key << "c0_estimate_r" << YAML::Value << t.c0_estimate_r;
  e << YAML::Key << "c0_estimate_lambda" << YAML::Value << t.c0_estimate_lambda;
  e << YAML::EndMap;
  if (c.fit_window) {
    const auto& w = *c.fit_window;
    e << YAML::Key << "fit_window" << YAML::Value << YAML::Flow << YAML::BeginSeq << w.x1_lo
      << w.x1_hi;
    if (!(w.x2_lo == 0.0 && w.x2_hi == 0.0)) e << w.x2_lo << w.x2_hi;
    e << YAML::EndSeq;
  }
  const auto& q = c.quasi_steady;
  e << YAML::Key << "quasi_steady" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "extend_by" << YAML::Value << q.extend_by;
  e << YAML::Key << "max_t" << YAML::Value << q.max_t;
  e << YAML::Key << "rel_change" << YAML::Value << q.rel_change;
  e << YAML::Key << "tail_fraction" << YAML::Value << q.tail_fraction;
  e << YAML::EndMap;
  if (!c.profile_path.empty()) e << YAML::Key << "profile" << YAML::Value << c.profile_path;
  if (!c.initial_path.empty()) e << YAML::Key << "initial" << YAML::Value << c.initial_path;
  if (!c.output_dir.empty()) {
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dir" << YAML::Value << c.output_dir;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

// ---- validation ----------------------------------------------------------------

void ScenarioConfig::validate() const {
  const auto& g = geometry;
  config_require(g.h > 0.0 && std::isfinite(g.h), "geometry.h must be positive");
  try {
    solver.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  config_require(snapshot_dt >= 0.0, "solver.snapshot_dt must be >= 0");
  if (C0) config_require(*C0 >= 0.0, "C0 must be >= 0");

  switch (kind) {
    case ScenarioKind::grim_reaper_1d: {
      const double half = g.L > 0.0 ? g.L : pi / 2 - g.delta;
      config_require(half > 0.0 && half < pi / 2,
                     "grim_reaper_1d needs L in (0, pi/2) or delta in (0, pi/2)");
      config_require(boundary.empty() || boundary == "tail_flux" || boundary == "exact" ||
                         boundary == "translating",
                     "grim_reaper_1d boundary must be tail_flux, exact or translating");
      break;
    }
    case ScenarioKind::slab2d_plane:
    case ScenarioKind::slab2d_delta_wing:
    case ScenarioKind::delta_wing_extract: {
      const double b = g.b > 0.0 ? g.b : pi / 2;
      config_require(b >= pi / 2, "geometry.b must be >= pi/2");
      config_require(g.delta > 0.0 && g.delta < b, "geometry.delta must be in (0, b)");
      config_require(g.L > 0.0, "geometry.L must be positive");
      if (kind != ScenarioKind::slab2d_plane)
        config_require(b > pi / 2, "delta wings need b > pi/2");
      config_require(boundary.empty() || boundary == "neumann" || boundary == "exact",
                     "slab boundary must be neumann or exact");
      if (kind == ScenarioKind::slab2d_delta_wing)
        config_require(!profile_path.empty(), "slab2d_delta_wing needs a profile table");
      break;
    }
    case ScenarioKind::radial_bowl:
      config_require(g.n >= 2, "radial_bowl needs n >= 2");
      config_require(g.r_max > 0.0, "radial_bowl needs r_max > 0");
      break;
    case ScenarioKind::custom:
      config_require(boundary.empty() || boundary == "translating",
                     "custom scenarios use translating Dirichlet faces");
      config_require(!initial_path.empty(), "custom scenarios need an initial table");
      config_require(!profile_path.empty(), "custom scenarios need a profile table");
      break;
  }

  const auto& p = perturbation;
  if (p.kind != PerturbationKind::none) {
    config_require(p.amplitude >= 0.0, "perturbation.amplitude must be >= 0");
    config_require(p.width > 0.0, "perturbation.width must be positive");
    if (C0)
      config_require(p.amplitude <= *C0 * (1.0 + 1e-12),
                     "perturbation sup-norm exceeds the declared C0");
  }
  if (p.kind == PerturbationKind::fourier)
    config_require(p.n_modes >= 1, "fourier perturbations need n_modes >= 1");
  if (p.x1_invariant) config_require(is_slab(kind), "x1_invariant applies to slab runs only");

  const auto& d = diagnostics;
  config_require(d.stability_decay >= 0.0, "diagnostics.stability_decay must be >= 0");
  config_require(d.continuity_delta > 0.0, "diagnostics.continuity_delta must be positive");
  config_require(d.comparability > 0.0, "diagnostics.comparability must be positive");
  if (d.reproduce_c0)
    config_require(kind == ScenarioKind::grim_reaper_1d &&
                       (boundary.empty() || boundary == "tail_flux"),
                   "reproduce_c0 needs a grim_reaper_1d run with tail_flux faces");
  if (d.harnack) config_require(kind == ScenarioKind::grim_reaper_1d, "harnack is 1D only");
  if (d.splitting)
    config_require(kind == ScenarioKind::slab2d_plane &&
                       (p.x1_invariant || p.kind == PerturbationKind::none),
                   "splitting needs slab2d_plane data with an x1-invariant perturbation");
  if (d.shift_bound) config_require(C0.has_value(), "shift_bound needs C0");
  if (d.c0_estimate) config_require(kind == ScenarioKind::slab2d_plane, "c0_estimate is slab only");
  const auto& q = quasi_steady;
  config_require(q.extend_by > 0.0 && q.max_t > 0.0 && q.rel_change > 0.0 &&
                     q.tail_fraction > 0.0 && q.tail_fraction < 1.0,
                 "bad quasi_steady settings");
}

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov) {
  if (ov.h) cfg.geometry.h = *ov.h;
  if (ov.t_end) cfg.solver.t_end = *ov.t_end;
  if (ov.seed) cfg.perturbation.seed = *ov.seed;
  if (ov.out_dir) cfg.output_dir = *ov.out_dir + "/" + cfg.name;
  cfg.validate();
}

// ---- perturbations ---------------------------------------------------------------

namespace {

// C-infinity cutoff, 1 at s = 0 and vanishing for |s| >= 1.
double cutoff(double s) {
  const double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

double bump(double rho, double w) {
  if (rho >= w) return 0.0;
  const double c = std::cos(pi * rho / (2.0 * w));
  return c * c;
}

// Portable uniform draws: the standard distributions are implementation
// defined, the engine is not.
struct Uniform {
  std::mt19937_64 eng;
  explicit Uniform(std::uint64_t seed) : eng(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

struct Mode {
  int k;
  double a, phase1, phase2;
};

std::vector<Mode> draw_modes(const Perturbation& p) {
  Uniform rnd(p.seed);
  std::vector<Mode> modes;
  for (int k = 1; k <= p.n_modes; ++k) {
    const double a = rnd(-1.0, 1.0) / k;
    const double ph1 = rnd(0.0, 2.0 * pi);
    const double ph2 = rnd(0.0, 2.0 * pi);
    modes.push_back({k, a, ph1, ph2});
  }
  return modes;
}

void check_support(const Grid1D& g, double c, double w, bool from_origin, const char* axis) {
  const double margin = 5.0 * g.h();
  const bool lo_ok = from_origin || c - w >= g.lo() + margin;
  config_require(lo_ok && c + w <= g.hi() - margin,
                 std::string("perturbation support reaches the ") + axis + " boundary");
}

}  // namespace

Field perturbation_field(const Perturbation& p, const Field& like) {
  std::vector<double> v(like.size(), 0.0);
  if (p.kind == PerturbationKind::none || p.amplitude == 0.0) return like.with_values(std::move(v));

  const Grid1D& g1 = like.grid(0);
  const bool radial = like.geometry() == Geometry::radial;
  const bool slab = like.geometry() == Geometry::slab2d;
  const double c1 = p.center[0], c2 = p.center[1], w = p.width;
  if (radial) config_require(c1 == 0.0, "radial perturbations must be centred at r = 0");
  if (!(slab && p.x1_invariant)) check_support(g1, c1, w, radial, "x1");
  if (slab) check_support(like.grid(1), c2, w, false, "x2");

  auto at = [&](int i, int j) -> double& {
    return v[slab ? like.index(i, j) : static_cast<std::size_t>(i)];
  };
  const int n2 = slab ? like.n_nodes(1) : 1;

  if (p.kind == PerturbationKind::bump) {
    for (int i = 0; i < g1.n_nodes(); ++i)
      for (int j = 0; j < n2; ++j) {
        const double d1v = p.x1_invariant ? 0.0 : g1.node(i) - c1;
        const double d2v = slab ? like.grid(1).node(j) - c2 : 0.0;
        at(i, j) = p.amplitude * bump(std::hypot(d1v, d2v), w);
      }
    return like.with_values(std::move(v));
  }

  const auto modes = draw_modes(p);
  for (int i = 0; i < g1.n_nodes(); ++i)
    for (int j = 0; j < n2; ++j) {
      const double s1 = (g1.node(i) - c1) / w;
      double val = 0.0;
      if (radial) {
        // Even in r, hence smooth through the origin.
        for (const auto& m : modes) val += m.a * std::cos(m.k * pi * s1);
        val *= cutoff(s1);
      } else if (!slab) {
        for (const auto& m : modes) val += m.a * std::cos(m.k * pi * s1 + m.phase1);
        val *= cutoff(s1);
      } else {
        const double s2 = (like.grid(1).node(j) - c2) / w;
        if (p.x1_invariant) {
          for (const auto& m : modes) val += m.a * std::cos(m.k * pi * s2 + m.phase2);
          val *= cutoff(s2);
        } else {
          for (const auto& m : modes)
            val += m.a * std::cos(m.k * pi * s1 + m.phase1) * std::cos(m.k * pi * s2 + m.phase2);
          val *= cutoff(s1) * cutoff(s2);
        }
      }
      at(i, j) = val;
    }
  double sup = 0.0;
  for (double x : v) sup = std::max(sup, std::abs(x));
  config_require(sup > 0.0, "fourier perturbation vanishes on the grid");
  const double scale = p.amplitude / sup;
  for (double& x : v) x *= scale;
  return like.with_values(std::move(v));
}

// ---- scenario setup ----------------------------------------------------------------

Grid1D centered_grid(double half, double h) {
  require(half > 0.0 && h > 0.0, "centered_grid: half-width and spacing must be positive");
  const int m = static_cast<int>(std::floor(half / h + 1e-9));
  require(m >= 1, "centered_grid: spacing exceeds the half-width");
  return Grid1D(-m * h, m * h, 2 * m);
}

namespace {

Field add(const Field& a, const Field& b) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += b.values()[k];
  return a.with_values(std::move(v));
}

}  // namespace

FitWindow default_fit_window(const Field& f) {
  const Grid1D& g1 = f.grid(0);
  if (f.geometry() == Geometry::radial) return FitWindow::interval(0.0, 0.5 * g1.hi());
  const double m1 = 0.25 * (g1.hi() - g1.lo());
  if (f.dims() == 1) return FitWindow::interval(g1.lo() + m1, g1.hi() - m1);
  const Grid1D& g2 = f.grid(1);
  const double m2 = 0.25 * (g2.hi() - g2.lo());
  return FitWindow::slab(g1.lo() + m1, g1.hi() - m1, g2.lo() + m2, g2.hi() - m2);
}

ScenarioSetup build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& g = cfg.geometry;
  std::shared_ptr<const TranslatorProfile> profile;
  BoundaryPolicy policy;
  std::optional<Field> base;

  switch (cfg.kind) {
    case ScenarioKind::grim_reaper_1d: {
      const double half = g.L > 0.0 ? g.L : pi / 2 - g.delta;
      const Grid1D grid = centered_grid(half, g.h);
      profile = std::make_shared<const TranslatorProfile>(TranslatorProfile::grim_reaper_1d());
      base.emplace(Field::sample_interval(grid, [](double x) { return grim_reaper(x).u; }));
      const std::string bc = cfg.boundary.empty() ? "tail_flux" : cfg.boundary;
      if (bc == "tail_flux") {
        policy.set(face::lo, FacePolicy::tail(-pi / 2)).set(face::hi, FacePolicy::tail(pi / 2));
      } else if (bc == "exact") {
        policy = BoundaryPolicy::all(FacePolicy::exact(profile));
      } else {
        policy = BoundaryPolicy::all(FacePolicy::translating(1.0));
      }
      break;
    }
    case ScenarioKind::delta_wing_extract:
      config_fail("delta_wing_extract scenarios have no evolution setup of their own");
    case ScenarioKind::slab2d_plane: {
      const double b = g.b > 0.0 ? g.b : pi / 2;
      const Grid1D x1 = centered_grid(g.L, g.h), x2 = centered_grid(b - g.delta, g.h);
      profile = std::make_shared<const TranslatorProfile>(TranslatorProfile::tilted_plane(b));
      base.emplace(Field::sample_slab(x1, x2, [&](double a, double c) { return tilted_grim_reaper(a, c, b).u; }));
      policy = BoundaryPolicy::all(FacePolicy::exact(profile));
      if (cfg.boundary == "neumann") {
        const double slope = std::tan(tilt_angle(b));
        policy.set(face::x1_lo, FacePolicy::neumann(slope))
            .set(face::x1_hi, FacePolicy::neumann(slope));
      }
      break;
    }
    case ScenarioKind::slab2d_delta_wing: {
      const double b = g.b;
      auto prof = std::make_shared<const TranslatorProfile>(load_profile(cfg.profile_path));
      config_require(prof->table() != nullptr && prof->table()->geometry() == Geometry::slab2d,
                     "delta-wing profile must be a slab table");
      profile = prof;
      const Field& tab = *prof->table();
      // The table's lattice may sit slightly inside the requested truncation.
      const Grid1D x1 = centered_grid(std::min(g.L, tab.grid(0).hi() + 1e-12), g.h);
      const Grid1D x2 = centered_grid(std::min(b - g.delta, tab.grid(1).hi() + 1e-12), g.h);
      config_require(x1.lo() >= tab.grid(0).lo() - 1e-9 && x1.hi() <= tab.grid(0).hi() + 1e-9 &&
                         x2.lo() >= tab.grid(1).lo() - 1e-9 && x2.hi() <= tab.grid(1).hi() + 1e-9,
                     "run domain exceeds the delta-wing table");
      base.emplace((x1 == tab.grid(0) && x2 == tab.grid(1))
                 ? tab
                 : Field::sample_slab(x1, x2, [&](double a, double c) { return linterp(tab, a, c); }));
      const double slope = std::tan(tilt_angle(b));
      policy = BoundaryPolicy::all(FacePolicy::translating(1.0));
      policy.set(face::x1_lo, FacePolicy::neumann(-slope)).set(face::x1_hi, FacePolicy::neumann(slope));
      break;
    }
    case ScenarioKind::radial_bowl: {
      const double r_tab = g.r_max + 1.5;
      auto prof = std::make_shared<const TranslatorProfile>(
          bowl_profile(g.n, r_tab, std::min(g.h, 0.0025)));
      profile = prof;
      const Grid1D grid = Grid1D::with_spacing(0.0, g.r_max, g.h);
      base.emplace(Field::sample_radial(grid, g.n, [&](double r) { return prof->value(r); }));
      policy = BoundaryPolicy::all(FacePolicy::exact(prof));
      break;
    }
    case ScenarioKind::custom: {
      const FieldTable init = load_table(cfg.initial_path);
      profile = std::make_shared<const TranslatorProfile>(load_profile(cfg.profile_path));
      base.emplace(init.field);
      policy = BoundaryPolicy::all(FacePolicy::translating(1.0));
      break;
    }
  }

  Field pert = perturbation_field(cfg.perturbation, *base);
  double sup = 0.0;
  for (double x : pert.values()) sup = std::max(sup, std::abs(x));
  if (cfg.C0)
    config_require(sup <= *cfg.C0 * (1.0 + 1e-12), "perturbation sup-norm exceeds the declared C0");
  Field initial = add(*base, pert);
  const FitWindow window = cfg.fit_window.value_or(default_fit_window(initial));
  try {
    window.validate(initial);
  } catch (const Error& e) {
    config_fail(std::string("fit_window: ") + e.what());
  }
  return ScenarioSetup{std::move(initial), policy, profile, window, std::move(pert)};
}

}  // namespace mcf
