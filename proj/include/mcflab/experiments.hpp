#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcflab/barriers.hpp"
#include "mcflab/diagnostics.hpp"
#include "mcflab/flow_solver.hpp"
#include "mcflab/translators.hpp"

namespace mcf {

enum class ScenarioKind {
  grim_reaper_1d,
  slab2d_plane,
  slab2d_delta_wing,
  radial_bowl,
  delta_wing_extract,
  custom,
};

const char* to_string(ScenarioKind k);

struct ScenarioGeometry {
  double b = 0.0;      // slab half-width; defaults to pi/2 where it applies
  double delta = 0.0;  // distance of the truncation from the slab boundary
  double L = 0.0;      // x1 half-extent (interval half-width when set)
  double r_max = 0.0;
  double h = 0.0;
  int n = 2;           // graph dimension of radial runs
};

enum class PerturbationKind { none, bump, fourier };

const char* to_string(PerturbationKind k);

/// bump: amplitude * cos^2(pi rho / (2 width)) for rho < width, rho the
/// distance to `center`.
/// fourier: seeded cosine modes times a smooth cutoff of radius `width`,
/// rescaled so the sup over the grid nodes equals `amplitude`.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::none;
  double amplitude = 0.0;
  std::array<double, 2> center{0.0, 0.0};
  double width = 0.0;
  std::uint64_t seed = 0;
  int n_modes = 0;
  /// Slab only: the perturbation depends on x2 alone, which keeps data of
  /// the form u0(0, x2) + x1 tan(theta).
  bool x1_invariant = false;
};

struct DiagnosticsToggles {
  bool monotonicity = true;   // 1D
  bool squeeze = true;        // needs C0
  bool convexity = true;
  bool harnack = false;       // 1D
  double harnack_alpha = 0.0;
  bool entropy = false;
  bool continuity = false;
  double continuity_delta = 0.1;
  bool reproduce_c0 = false;  // 1D tail_flux runs
  bool splitting = false;     // slab runs with x1-invariant data
  bool fit_c1 = false;
  /// Required decay of the post-fit sup distance from t = 0 to the end
  /// (0 disables the check).
  double stability_decay = 0.0;
  bool shift_bound = false;   // |c1| tan(theta) + |c0| <= C0 * factor + 5 h^2
  double comparability = 1.0;
  bool c0_estimate = false;   // slab runs
  double c0_estimate_r = 0.5;
  double c0_estimate_lambda = 0.25;
};

/// Extension policy for runs that must reach a quasi-steady fit: the run is
/// lengthened by `extend_by` until the relative change of the fit residual
/// over the last `tail_fraction` of the snapshots drops below `rel_change`,
/// or t reaches `max_t`.
struct QuasiSteady {
  double extend_by = 5.0;
  double max_t = 40.0;
  double rel_change = 1e-3;
  double tail_fraction = 0.1;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::grim_reaper_1d;
  ScenarioGeometry geometry;
  /// grim_reaper_1d: tail_flux | exact | translating.
  /// slab kinds: x1-face policy, neumann | exact.
  std::string boundary;
  Perturbation perturbation;
  std::optional<double> C0;
  SolverConfig solver;
  double snapshot_dt = 0.0;  // overrides solver.snapshot_stride when > 0
  DiagnosticsToggles diagnostics;
  std::optional<FitWindow> fit_window;
  QuasiSteady quasi_steady;
  std::string profile_path;  // delta-wing table, custom reference profile
  std::string initial_path;  // custom initial field
  std::string output_dir;

  /// Throws config_error. Grid-dependent invariants (perturbation support,
  /// sup norm) are checked when the initial field is built.
  void validate() const;
};

ScenarioConfig parse_scenario(const std::string& yaml_text);
ScenarioConfig load_scenario(const std::string& path);
/// Round-trips through parse_scenario.
std::string dump_scenario(const ScenarioConfig& cfg);

struct RunOverrides {
  std::optional<double> h;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;  // parent directory; the name is appended
};

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& ov);

Field perturbation_field(const Perturbation& p, const Field& like);

/// Initial data, boundary policy and reference translator of a scenario.
struct ScenarioSetup {
  Field initial;
  BoundaryPolicy policy;
  std::shared_ptr<const TranslatorProfile> profile;
  FitWindow window;
  Field perturbation;
};

ScenarioSetup build_scenario(const ScenarioConfig& cfg);

/// Central half of each axis (radial: [0, r_max/2]).
FitWindow default_fit_window(const Field& f);

/// Grid with spacing exactly h, symmetric about 0 (a node), whose half-width
/// is `half` rounded down to a multiple of h. Runs with different
/// truncations therefore share their nodes.
Grid1D centered_grid(double half, double h);

struct ReportBundle {
  std::string name;
  std::string csv_path;
  std::string table_path;
  std::string summary_path;
  std::string config_path;
  std::vector<CheckResult> checks;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<std::string, double>> constants;
  bool aborted = false;
  std::string abort_reason;

  bool passed() const noexcept;
  /// 0 all checks pass, 1 a check failed or was inconclusive, 3 solver abort.
  int exit_code() const noexcept;
  const CheckResult* check(const std::string& name) const noexcept;
  std::optional<double> constant(const std::string& name) const noexcept;
};

/// Writes the time-series CSV, the final field table, summary.json and the
/// config echo under the output directory.
ReportBundle run_scenario(const ScenarioConfig& cfg);

/// Per-snapshot diagnostics shared by run_scenario and the fit command.
std::vector<DiagnosticsRecord> snapshot_diagnostics(const ScenarioConfig& cfg,
                                                    const ScenarioSetup& setup,
                                                    const Trajectory& traj);

void write_timeseries_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);

// ---- c0 reproduction ---------------------------------------------------------

struct C0Verdict {
  CheckStatus status = CheckStatus::inconclusive;
  double target = 0.0;       // (1/pi) * integral of u0 - ubar
  double c0_fit = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
  double phi_drift = 0.0;
  double phi_tolerance = 0.0;
  double t_final = 0.0;
  double residual_rel_change = 0.0;
  std::string detail;
};

/// Evolves a 1D scenario, extending the run until the fit is quasi-steady.
/// Fills `traj_out` with the final trajectory when given.
C0Verdict reproduce_c0(const ScenarioConfig& cfg, Trajectory* traj_out = nullptr);

/// Relative change of the fit residual over the last `fraction` of the
/// samples.
double residual_rel_change(const std::vector<double>& residual, double fraction);

// ---- delta-wing extraction -----------------------------------------------------

struct WingOptions {
  double L = 4.0;
  double delta = 0.5;
  double h_coarse = 1.0 / 40.0;
  double h_fine = 1.0 / 80.0;
  double t_coarse = 12.0;
  double t_fine = 3.0;
  double seed_width = 1.0;    // l in tan(theta) sqrt(x1^2 + l^2)
  double residual_tol = 1e-3;
  double slope_tol = 1e-3;
  /// Interior on which the residual is certified: the x1 and x2 margins
  /// kept away from the faces.
  double x1_margin = 0.5;
  double x2_margin = 0.25;
};

struct WingExtraction {
  std::shared_ptr<const TranslatorProfile> profile;
  bool certified = false;
  double residual = 0.0;        // interior sup of the translator residual
  double max_slope = 0.0;       // max |du/dx1|
  double far_slope = 0.0;       // du/dx1 next to the x1 faces, averaged over x2
  double symmetry_error = 0.0;  // max |u(x1,x2) - u(-x1,x2)|, |u(x1,x2) - u(x1,-x2)|
  double coarse_rate = 0.0;     // sup |u_t - 1| at the end of the coarse stage
  double fine_rate = 0.0;
  FitWindow interior;
};

WingExtraction extract_delta_wing(double b, const WingOptions& opts = {});

/// Parameters of a slab2d_delta_wing run for an extracted wing saved at
/// `table_path`.
ScenarioConfig wing_scenario(const std::string& table_path, double b, double h,
                             const WingOptions& opts = {});

// ---- boundary insensitivity ----------------------------------------------------

struct BoundarySensitivity {
  double err_h = 0.0;       // sup |u_h - u_{h/2}| on the window at T
  double diff_delta = 0.0;  // sup |u(delta/2) - u(delta)| on the window at T
  double diff_L = 0.0;      // sup |u(1.5 L) - u(L)|
  double factor = 10.0;
  CheckStatus status = CheckStatus::inconclusive;
};

/// Reruns a slab2d_plane scenario with delta halved, L grown by 50% and h
/// halved, and compares the solutions at t_end on the fixed window.
BoundarySensitivity boundary_insensitivity(const ScenarioConfig& base, const FitWindow& window,
                                           double factor = 10.0);

// ---- sweeps and check suites ---------------------------------------------------

struct SweepRow {
  std::string name;
  std::string source;
  int exit_code = 0;
  int passed = 0;
  int failed = 0;
  std::string error;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  int exit_code() const noexcept;  // max over rows (0 when empty)
};

SweepSummary sweep(const std::vector<ScenarioConfig>& configs);
/// Loads every *.yaml / *.yml file of a directory (sorted by name).
SweepSummary sweep_directory(const std::string& dir, const RunOverrides& ov = {});

void write_sweep_summary(std::ostream& os, const SweepSummary& s);

/// Runs the named invariant suite (formulas, operators, profiles, all),
/// printing one line per invariant. Returns the number of failures.
int run_check_suite(const std::string& suite, std::ostream& out);

// ---- standalone fitting --------------------------------------------------------

struct TableFit {
  double t = 0.0;
  FitResult fit;
};

/// Fits every field table (a file, or the *.table files of a directory)
/// against a profile table. Tables carry their time in the `t` header key.
std::vector<TableFit> fit_tables(const std::string& trajectory,
                                 const TranslatorProfile& profile,
                                 const std::optional<FitWindow>& window,
                                 bool fit_c1, double c1_half_width);

}  // namespace mcf
