#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mcflab/error.hpp"
#include "mcflab/experiments.hpp"
#include "mcflab/profile_io.hpp"

using namespace mcf;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const char* kRippled = R"(
name: rippled
kind: grim_reaper_1d
geometry: {L: 1.45, h: 0.02}
boundary: tail_flux
perturbation: {type: fourier, amplitude: 0.02, width: 1.0, seed: 4, n_modes: 2}
C0: 0.02
solver: {t_end: 0.1, snapshot_dt: 0.01}
diagnostics: {harnack: true}
fit_window: [-1.2, 1.2]
)";

std::string scratch_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "mcflab_unit" / leaf;
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("config text survives a dump/parse cycle") {
  const ScenarioConfig a = parse_scenario(kRippled);
  CHECK(a.name == "rippled");
  CHECK(a.perturbation.kind == PerturbationKind::fourier);
  CHECK(a.perturbation.seed == 4);
  const std::string once = dump_scenario(a);
  const std::string twice = dump_scenario(parse_scenario(once));
  CHECK(once == twice);
}

TEST_CASE("config validation rejects bad input with config_error") {
  CHECK(code_of([] { parse_scenario("name: x\nkind: grim_reaper_1d\ngeometry: {L: 1, h: 0.1, w: 2}\n"); }) ==
        ErrorCode::config_error);
  CHECK(code_of([] { parse_scenario("kind: pancake\n"); }) == ErrorCode::config_error);

  ScenarioConfig c = parse_scenario(kRippled);
  c.C0 = 0.01;  // below the perturbation amplitude
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_error);

  c = parse_scenario(kRippled);
  c.kind = ScenarioKind::slab2d_plane;
  c.geometry = {pi / 2 + 0.3, 0.4, 1.0, 0.0, 0.05, 2};
  c.boundary = "exact";
  c.fit_window.reset();
  c.diagnostics.harnack = false;
  c.diagnostics.splitting = true;  // fourier data in x1 breaks the splitting form
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_error);

  c = parse_scenario(kRippled);
  c.geometry.L = 1.6;  // beyond pi/2
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::config_error);
}

TEST_CASE("overrides replace spacing, horizon, seed and nest the output directory") {
  ScenarioConfig c = parse_scenario(kRippled);
  RunOverrides ov;
  ov.h = 0.01;
  ov.t_end = 0.5;
  ov.seed = 99;
  ov.out_dir = "/tmp/somewhere";
  apply_overrides(c, ov);
  CHECK(c.geometry.h == 0.01);
  CHECK(c.solver.t_end == 0.5);
  CHECK(c.perturbation.seed == 99);
  CHECK(c.output_dir == "/tmp/somewhere/rippled");
}

TEST_CASE("centered grids keep the spacing and share nodes across truncations") {
  const Grid1D a = centered_grid(1.3, 0.05);
  CHECK(a.h() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(a.hi() == doctest::Approx(1.3));
  const Grid1D b = centered_grid(1.32, 0.05);
  CHECK(b.hi() == doctest::Approx(1.3));
  CHECK(a.node(a.n_nodes() / 2) == doctest::Approx(0.0));
  CHECK(code_of([] { centered_grid(0.01, 0.05); }) == ErrorCode::invalid_argument);
}

TEST_CASE("fourier perturbations: sup equals amplitude, seeded, compactly supported") {
  const Field like = Field::sample_interval(centered_grid(1.45, 0.01), [](double) { return 0.0; });
  Perturbation p;
  p.kind = PerturbationKind::fourier;
  p.amplitude = 0.05;
  p.width = 0.8;
  p.seed = 11;
  p.n_modes = 4;
  const Field a = perturbation_field(p, like), b = perturbation_field(p, like);
  double sup = 0.0;
  for (int i = 0; i < a.n_nodes(0); ++i) {
    sup = std::max(sup, std::abs(a(i)));
    CHECK(a(i) == b(i));
    if (std::abs(like.grid(0).node(i)) >= 0.8) CHECK(a(i) == 0.0);
  }
  CHECK(sup == doctest::Approx(0.05).epsilon(1e-14));

  p.seed = 12;
  const Field c = perturbation_field(p, like);
  double diff = 0.0;
  for (int i = 0; i < a.n_nodes(0); ++i) diff = std::max(diff, std::abs(a(i) - c(i)));
  CHECK(diff > 1e-3);
}

TEST_CASE("bump perturbation peaks at its center") {
  const Field like = Field::sample_interval(centered_grid(1.0, 0.01), [](double) { return 0.0; });
  Perturbation p;
  p.kind = PerturbationKind::bump;
  p.amplitude = 0.2;
  p.width = 0.5;
  const Field f = perturbation_field(p, like);
  CHECK(f(100) == doctest::Approx(0.2));
  CHECK(f(50) == 0.0);  // x = -0.5
  CHECK(f(75) == doctest::Approx(0.2 * 0.5));  // cos^2(pi/4)
}

TEST_CASE("a scenario run writes identical artifacts when repeated") {
  ScenarioConfig c = parse_scenario(kRippled);
  c.output_dir = scratch_dir("rerun_a");
  const ReportBundle a = run_scenario(c);
  c.output_dir = scratch_dir("rerun_b");
  const ReportBundle b = run_scenario(c);
  CHECK(a.exit_code() == 0);
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
  CHECK(slurp(a.table_path) == slurp(b.table_path));

  std::ifstream csv(a.csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "t,sup_dist,I_total,sup_kappa,phi,c0_fit,c1_fit,fit_residual,harnack_min,convexity_margin,"
        "squeeze_violation");

  const auto j = nlohmann::json::parse(slurp(a.summary_path));
  CHECK(j["name"] == "rippled");
  CHECK(j["exit_code"] == 0);
  CHECK(j["checks"].size() == a.checks.size());

  // The echoed config reproduces the run.
  ScenarioConfig echo = load_scenario(a.config_path);
  CHECK(echo.output_dir == a.csv_path.substr(0, a.csv_path.rfind('/')));
  echo.output_dir = c.output_dir;
  CHECK(dump_scenario(echo) == dump_scenario(c));
}

TEST_CASE("backward-parabolic control fails the monotonicity audit") {
  ScenarioConfig c = parse_scenario(kRippled);
  c.name = "wrong_sign";
  c.geometry.h = 0.01;
  c.solver.pde_sign = -1;
  c.solver.t_end = 0.001;
  c.snapshot_dt = 0.0;
  c.solver.snapshot_stride = 1;
  c.diagnostics.harnack = false;
  c.output_dir = scratch_dir("wrong_sign");
  const ReportBundle r = run_scenario(c);
  REQUIRE(r.check("monotonicity") != nullptr);
  CHECK(r.check("monotonicity")->status == CheckStatus::fail);
  CHECK(r.exit_code() == 1);
}

TEST_CASE("overflow of the backward slab flow maps to exit code 3") {
  ScenarioConfig c = parse_scenario(R"(
name: blow_up
kind: slab2d_plane
geometry: {b: 1.8707963267948966, delta: 0.4, L: 1.0, h: 0.05}
boundary: exact
perturbation: {type: bump, amplitude: 0.1, width: 0.5}
C0: 0.1
solver: {t_end: 1.0, snapshot_stride: 50, pde_sign: -1}
)");
  c.output_dir = scratch_dir("blow_up");
  const ReportBundle r = run_scenario(c);
  CHECK(r.aborted);
  CHECK(r.exit_code() == 3);
}

TEST_CASE("sweeps aggregate exit codes") {
  CHECK(sweep({}).exit_code() == 0);

  const std::string dir = scratch_dir("sweep_in");
  fs::create_directories(dir);
  std::ofstream(dir + "/a_good.yaml") << kRippled;
  std::ofstream(dir + "/b_bad.yaml") << "name: bad\nkind: grim_reaper_1d\nnonsense: 1\n";
  std::ofstream(dir + "/notes.txt") << "ignored";
  RunOverrides ov;
  ov.out_dir = scratch_dir("sweep_out");
  const SweepSummary s = sweep_directory(dir, ov);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.exit_code() == 2);
  int good = 0, bad = 0;
  for (const auto& r : s.rows) {
    if (r.name == "rippled") good = r.exit_code + 10;
    if (r.name == "b_bad") bad = r.exit_code + 10;
  }
  CHECK(good == 10);
  CHECK(bad == 12);

  std::ostringstream os;
  write_sweep_summary(os, s);
  CHECK(os.str().rfind("name,exit_code,passed,failed,source,error\n", 0) == 0);

  CHECK(code_of([] { sweep_directory("/nonexistent/dir"); }) == ErrorCode::config_error);
}

TEST_CASE("invariant suites") {
  std::ostringstream os;
  CHECK(run_check_suite("all", os) == 0);
  CHECK(os.str().find("FAIL") == std::string::npos);
  CHECK(code_of([&] { run_check_suite("everything", os); }) == ErrorCode::config_error);
}

TEST_CASE("fit_tables recovers the vertical shift of a stored snapshot") {
  const std::string dir = scratch_dir("fit_tables");
  fs::create_directories(dir);
  const Grid1D g = centered_grid(1.4, 0.01);
  const Field f = Field::sample_interval(g, [](double x) { return grim_reaper(x).u + 0.7 + 0.125; });
  save_table(dir + "/snap_0001.table", f, {{"kind", "snapshot"}, {"t", "0.7"}});
  const auto fits = fit_tables(dir, TranslatorProfile::grim_reaper_1d(), std::nullopt, false, 0.0);
  REQUIRE(fits.size() == 1);
  CHECK(fits[0].t == doctest::Approx(0.7));
  CHECK(fits[0].fit.c0 == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(fits[0].fit.sup_dist < 1e-12);
}

TEST_CASE("boundary insensitivity on a coarse tilted plane") {
  ScenarioConfig c;
  c.name = "coarse";
  c.kind = ScenarioKind::slab2d_plane;
  c.geometry.b = pi / 2 + 0.3;
  c.geometry.delta = 0.4;
  c.geometry.L = 2.0;
  c.geometry.h = 0.1;
  c.boundary = "exact";
  c.perturbation.kind = PerturbationKind::bump;
  c.perturbation.amplitude = 0.2;
  c.perturbation.width = 0.5;
  c.C0 = 0.2;
  c.solver.t_end = 0.05;
  const BoundarySensitivity r = boundary_insensitivity(c, FitWindow::slab(-0.5, 0.5, -0.5, 0.5));
  CHECK(r.err_h > 0.0);
  CHECK(r.diff_delta < r.err_h);
  CHECK(r.diff_L < r.err_h);
  CHECK(r.status == CheckStatus::pass);
}

TEST_CASE("residual change over the tail of a series") {
  CHECK(residual_rel_change({1.0, 1.0, 1.0, 1.0}, 0.5) == 0.0);
  CHECK(residual_rel_change({4.0, 3.0, 2.0, 1.0}, 1.0) == doctest::Approx(3.0));
  CHECK(std::isinf(residual_rel_change({1.0}, 0.5)));
}
