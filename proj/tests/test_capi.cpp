#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "mcflab/mcflab.h"

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
name: capi_small
kind: grim_reaper_1d
geometry: {L: 1.45, h: 0.02}
boundary: tail_flux
perturbation: {type: fourier, amplitude: 0.02, width: 1.0, seed: 2, n_modes: 2}
C0: 0.02
solver: {t_end: 0.05, snapshot_dt: 0.01}
fit_window: [-1.2, 1.2]
)";

std::string tmp(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "mcflab_capi" / leaf;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p.string();
}

}  // namespace

TEST_CASE("errors come back as codes with a message") {
  mcf_scenario* s = nullptr;
  CHECK(mcf_scenario_parse("kind: nope\n", &s) == MCF_CONFIG_ERROR);
  CHECK(s == nullptr);
  CHECK(std::string(mcf_last_error()).find("nope") != std::string::npos);
  CHECK(mcf_scenario_load("/nonexistent.yaml", &s) != MCF_OK);
  CHECK(mcf_scenario_parse(nullptr, &s) == MCF_INVALID_ARGUMENT);
  CHECK(mcf_run(nullptr, nullptr) == MCF_INVALID_ARGUMENT);
  CHECK(std::string(mcf_status_name(MCF_SOLVER_ABORT)) == "solver_abort");
  mcf_scenario_free(nullptr);
  mcf_report_free(nullptr);
  mcf_profile_free(nullptr);
}

TEST_CASE("scenario run through the C interface") {
  mcf_scenario* s = nullptr;
  REQUIRE(mcf_scenario_parse(kSmall, &s) == MCF_OK);
  CHECK(std::string(mcf_scenario_name(s)) == "capi_small");

  const std::string out = tmp("runs");
  mcf_overrides ov{};
  ov.has_seed = 1;
  ov.seed = 5;
  ov.out_dir = out.c_str();
  REQUIRE(mcf_scenario_apply(s, &ov) == MCF_OK);
  CHECK(std::string(mcf_scenario_yaml(s)).find("seed: 5") != std::string::npos);

  mcf_overrides bad{};
  bad.has_h = 1;
  bad.h = -1.0;
  CHECK(mcf_scenario_apply(s, &bad) == MCF_CONFIG_ERROR);

  mcf_report* r = nullptr;
  REQUIRE(mcf_run(s, &r) == MCF_OK);
  CHECK(mcf_report_exit_code(r) == 0);
  REQUIRE(mcf_report_check_count(r) > 0);
  const char *name = nullptr, *detail = nullptr;
  mcf_check_status st = MCF_CHECK_FAIL;
  double v = -1.0;
  REQUIRE(mcf_report_check(r, 0, &name, &st, &v, &detail) == MCF_OK);
  CHECK(st == MCF_CHECK_PASS);
  CHECK(mcf_report_check(r, 1000, &name, &st, &v, &detail) == MCF_INVALID_ARGUMENT);

  double h = 0.0;
  CHECK(mcf_report_constant(r, "h", &h) == MCF_OK);
  CHECK(h == doctest::Approx(0.02));
  CHECK(mcf_report_constant(r, "no_such_constant", &h) == MCF_INVALID_ARGUMENT);

  CHECK(fs::exists(mcf_report_path(r, "csv")));
  CHECK(fs::exists(mcf_report_path(r, "summary")));
  CHECK(std::string(mcf_report_path(r, "csv")).rfind(out + "/capi_small", 0) == 0);

  REQUIRE(mcf_report_record_count(r) == 6);
  double row[11];
  REQUIRE(mcf_report_record(r, 5, row) == MCF_OK);
  CHECK(row[0] == doctest::Approx(0.05));
  mcf_report_free(r);
  mcf_scenario_free(s);
}

TEST_CASE("bowl and tilted tables through the C interface") {
  mcf_profile* bowl = nullptr;
  REQUIRE(mcf_profile_bowl(2, 12.0, 0.0025, &bowl) == MCF_OK);
  CHECK(std::string(mcf_profile_kind(bowl)) == "bowl");
  double u = 0.0;
  REQUIRE(mcf_profile_eval(bowl, 1.0, 0.0, &u) == MCF_OK);
  CHECK(u == doctest::Approx(0.2580261670372251).epsilon(1e-7));
  REQUIRE(mcf_profile_eval(bowl, 10.0, 0.0, &u) == MCF_OK);
  CHECK(u == doctest::Approx(47.05538972604325).epsilon(1e-7));
  CHECK(mcf_profile_residual_sup(bowl) <= 1e-6);

  const std::string path = tmp("bowl.table");
  REQUIRE(mcf_profile_save(bowl, path.c_str()) == MCF_OK);
  mcf_profile* back = nullptr;
  REQUIRE(mcf_profile_load(path.c_str(), &back) == MCF_OK);
  double u2 = 0.0;
  mcf_profile_eval(bowl, 3.3, 0.0, &u);
  mcf_profile_eval(back, 3.3, 0.0, &u2);
  CHECK(u == u2);
  mcf_profile_free(back);
  mcf_profile_free(bowl);

  mcf_profile* t = nullptr;
  REQUIRE(mcf_profile_tilted(2.0, 1.0, 0.3, 0.02, &t) == MCF_OK);
  const double tan_theta = std::tan(std::acos(std::numbers::pi / 4.0));
  double a = 0.0, b = 0.0;
  mcf_profile_eval(t, 0.5, 0.2, &a);
  mcf_profile_eval(t, -0.5, 0.2, &b);
  CHECK(a - b == doctest::Approx(tan_theta).epsilon(1e-10));
  mcf_profile_free(t);

  CHECK(mcf_profile_tilted(1.0, 1.0, 0.3, 0.02, &t) != MCF_OK);
  CHECK(t == nullptr);
}

TEST_CASE("invariant suites stream one line per invariant") {
  std::vector<std::string> lines;
  int failures = -1;
  auto collect = [](const char* line, void* user) {
    static_cast<std::vector<std::string>*>(user)->push_back(line);
  };
  REQUIRE(mcf_check_suite("formulas", collect, &lines, &failures) == MCF_OK);
  CHECK(failures == 0);
  CHECK(lines.size() == 5);
  for (const auto& l : lines) CHECK(l.rfind("PASS formulas/", 0) == 0);
  CHECK(mcf_check_suite("bogus", collect, &lines, &failures) == MCF_CONFIG_ERROR);
}

TEST_CASE("fit through the C interface") {
  mcf_scenario* s = nullptr;
  REQUIRE(mcf_scenario_parse(kSmall, &s) == MCF_OK);
  mcf_overrides ov{};
  const std::string out = tmp("fit_runs");
  ov.out_dir = out.c_str();
  mcf_scenario_apply(s, &ov);
  mcf_report* r = nullptr;
  REQUIRE(mcf_run(s, &r) == MCF_OK);

  // A grim reaper table as the profile; the final snapshot as trajectory.
  mcf_profile* gr = nullptr;
  const std::string prof = tmp("gr.table");
  {
    std::FILE* f = std::fopen(prof.c_str(), "w");
    std::fprintf(f, "# kind=grim_reaper n=1 b=0 theta=0 residual_sup=0 geometry=interval\n");
    for (int i = -150; i <= 150; ++i) {
      const double x = i * 0.01;
      std::fprintf(f, "%.17g,%.17g\n", x, -std::log(std::cos(x)));
    }
    std::fclose(f);
  }
  REQUIRE(mcf_profile_load(prof.c_str(), &gr) == MCF_OK);
  mcf_profile_free(gr);

  struct Acc {
    int n = 0;
    double t = 0.0, c0 = 0.0;
  } acc;
  auto cb = [](double t, double c0, double, double, double, void* user) {
    auto* a = static_cast<Acc*>(user);
    ++a->n;
    a->t = t;
    a->c0 = c0;
  };
  const double window[4] = {-1.2, 1.2, 0.0, 0.0};
  REQUIRE(mcf_fit(mcf_report_path(r, "table"), prof.c_str(), window, 0, 0.0, cb, &acc) == MCF_OK);
  CHECK(acc.n == 1);
  CHECK(acc.t == doctest::Approx(0.05));
  double c0 = 0.0;
  REQUIRE(mcf_report_constant(r, "c0_fit_final", &c0) == MCF_OK);
  CHECK(std::abs(acc.c0 - c0) < 1e-4);
  mcf_report_free(r);
  mcf_scenario_free(s);
}

TEST_CASE("sweep through the C interface") {
  const std::string dir = tmp("sweep_in");
  fs::create_directories(dir);
  {
    std::FILE* f = std::fopen((dir + "/one.yaml").c_str(), "w");
    std::fputs(kSmall, f);
    std::fclose(f);
  }
  mcf_overrides ov{};
  const std::string out = tmp("sweep_out");
  ov.out_dir = out.c_str();
  mcf_sweep* sw = nullptr;
  REQUIRE(mcf_sweep_dir(dir.c_str(), &ov, &sw) == MCF_OK);
  CHECK(mcf_sweep_count(sw) == 1);
  CHECK(mcf_sweep_exit_code(sw) == 0);
  const std::string csv = tmp("sweep.csv");
  CHECK(mcf_sweep_write(sw, csv.c_str()) == MCF_OK);
  CHECK(fs::file_size(csv) > 0);
  mcf_sweep_free(sw);
}
