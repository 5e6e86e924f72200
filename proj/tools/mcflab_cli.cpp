// Command-line front end. Talks to the library through the C interface only.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcflab/mcflab.h"

namespace {

struct Globals {
  std::optional<std::string> out;
  std::optional<double> h;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int exit_for(mcf_status s) {
  switch (s) {
    case MCF_OK: return 0;
    case MCF_SOLVER_ABORT:
    case MCF_CFL_VIOLATION: return 3;
    case MCF_NOT_CONVERGED: return 1;
    default: return 2;
  }
}

int report_error(mcf_status s) {
  std::cerr << "error (" << mcf_status_name(s) << "): " << mcf_last_error() << '\n';
  return exit_for(s);
}

mcf_overrides overrides(const Globals& g) {
  mcf_overrides o{};
  if (g.h) { o.has_h = 1; o.h = *g.h; }
  if (g.t_end) { o.has_t_end = 1; o.t_end = *g.t_end; }
  if (g.seed) { o.has_seed = 1; o.seed = *g.seed; }
  o.out_dir = g.out ? g.out->c_str() : nullptr;
  return o;
}

const char* status_word(mcf_check_status s) {
  switch (s) {
    case MCF_CHECK_PASS: return "PASS";
    case MCF_CHECK_FAIL: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

int cmd_run(const Globals& g, const std::string& config) {
  mcf_scenario* sc = nullptr;
  if (auto s = mcf_scenario_load(config.c_str(), &sc); s != MCF_OK) return report_error(s);
  const mcf_overrides ov = overrides(g);
  if (auto s = mcf_scenario_apply(sc, &ov); s != MCF_OK) {
    mcf_scenario_free(sc);
    return report_error(s);
  }
  mcf_report* rep = nullptr;
  const mcf_status s = mcf_run(sc, &rep);
  mcf_scenario_free(sc);
  if (s != MCF_OK) return report_error(s);

  const int code = mcf_report_exit_code(rep);
  if (!g.quiet) {
    for (size_t i = 0; i < mcf_report_check_count(rep); ++i) {
      const char *name = nullptr, *detail = nullptr;
      mcf_check_status st{};
      double value = 0.0;
      mcf_report_check(rep, i, &name, &st, &value, &detail);
      std::printf("%s %s value=%.6g%s%s\n", status_word(st), name, value, *detail ? "  " : "", detail);
    }
    if (code == 3) std::printf("%s\n", mcf_report_abort_reason(rep));
    std::printf("summary: %s\n", mcf_report_path(rep, "summary"));
  }
  mcf_report_free(rep);
  return code;
}

int cmd_sweep(const Globals& g, const std::string& dir) {
  mcf_sweep* sw = nullptr;
  const mcf_overrides ov = overrides(g);
  if (auto s = mcf_sweep_dir(dir.c_str(), &ov, &sw); s != MCF_OK) return report_error(s);
  if (!g.quiet) {
    for (size_t i = 0; i < mcf_sweep_count(sw); ++i) {
      const char *name = nullptr, *err = nullptr;
      int code = 0, passed = 0, failed = 0;
      mcf_sweep_row(sw, i, &name, &code, &passed, &failed, &err);
      std::printf("%-32s exit=%d passed=%d failed=%d%s%s\n", name, code, passed, failed,
                  *err ? "  " : "", err);
    }
  }
  int code = mcf_sweep_exit_code(sw);
  if (g.out) {
    std::error_code ec;
    std::filesystem::create_directories(*g.out, ec);
    const std::string path = *g.out + "/sweep_summary.csv";
    if (auto s = mcf_sweep_write(sw, path.c_str()); s != MCF_OK) code = std::max(code, report_error(s));
  }
  mcf_sweep_free(sw);
  return code;
}

void print_line(const char* line, void* user) {
  if (!*static_cast<bool*>(user) || line[0] == 'F') std::printf("%s\n", line);
}

int cmd_check(const Globals& g, const std::string& suite) {
  int failures = 0;
  bool verbose = !g.quiet;
  if (auto s = mcf_check_suite(suite.c_str(), print_line, &verbose, &failures); s != MCF_OK)
    return report_error(s);
  if (!g.quiet) std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}

int save_and_describe(const Globals& g, mcf_profile* p) {
  const mcf_status s = mcf_profile_save(p, g.out->c_str());
  if (s == MCF_OK && !g.quiet)
    std::printf("wrote %s (kind=%s residual_sup=%.3g)\n", g.out->c_str(), mcf_profile_kind(p),
                mcf_profile_residual_sup(p));
  mcf_profile_free(p);
  return s == MCF_OK ? 0 : report_error(s);
}

void print_fit(double t, double c0, double c1, double residual, double sup_dist, void* user) {
  std::FILE* f = static_cast<std::FILE*>(user);
  std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, c0, c1, residual, sup_dist);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for translating graphs of mean curvature flow"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--out", g.out, "Output directory (run, sweep) or file (profile, fit)");
  app.add_option("--h", g.h, "Grid spacing override");
  app.add_option("--t-end", g.t_end, "Final time override");
  app.add_option("--seed", g.seed, "Perturbation seed override");
  app.add_flag("--quiet", g.quiet, "Only report failures");

  std::string config, dir, suite, trajectory, profile;
  int code = 0;

  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config)->required()->check(CLI::ExistingFile);
  run->callback([&] { code = cmd_run(g, config); });

  auto* sw = app.add_subcommand("sweep", "Run every config in a directory");
  sw->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);
  sw->callback([&] { code = cmd_sweep(g, dir); });

  auto* chk = app.add_subcommand("check", "Run an invariant suite (formulas, operators, profiles, all)");
  chk->add_option("suite", suite)->required();
  chk->callback([&] { code = cmd_check(g, suite); });

  auto* prof = app.add_subcommand("profile", "Tabulate a translator");
  prof->require_subcommand(1);
  prof->fallthrough();

  int bowl_n = 2;
  double bowl_rmax = 20.0;
  auto* bowl = prof->add_subcommand("bowl", "Radial bowl soliton");
  bowl->add_option("--n", bowl_n, "Graph dimension")->capture_default_str();
  bowl->add_option("--r-max", bowl_rmax, "Radius of the table")->capture_default_str();
  bowl->callback([&] {
    if (!g.out) throw CLI::RequiredError("--out");
    mcf_profile* p = nullptr;
    if (auto s = mcf_profile_bowl(bowl_n, bowl_rmax, g.h.value_or(0.0025), &p); s != MCF_OK) {
      code = report_error(s);
      return;
    }
    code = save_and_describe(g, p);
  });

  double tilt_b = 0.0, tilt_L = 2.0, tilt_delta = 0.3;
  auto* tilted = prof->add_subcommand("tilted", "Tilted grim reaper plane sampled on the truncated slab");
  tilted->add_option("--b", tilt_b, "Slab half-width (>= pi/2)")->required();
  tilted->add_option("--L", tilt_L, "x1 half-extent")->capture_default_str();
  tilted->add_option("--delta", tilt_delta, "Truncation distance")->capture_default_str();
  tilted->callback([&] {
    if (!g.out) throw CLI::RequiredError("--out");
    mcf_profile* p = nullptr;
    if (auto s = mcf_profile_tilted(tilt_b, tilt_L, tilt_delta, g.h.value_or(0.02), &p); s != MCF_OK) {
      code = report_error(s);
      return;
    }
    code = save_and_describe(g, p);
  });

  double wing_b = 0.0;
  mcf_wing_options wo;
  mcf_wing_options_default(&wo);
  auto* wing = prof->add_subcommand("extract-wing", "Relax a Delta-wing by long-time evolution");
  wing->add_option("--b", wing_b, "Slab half-width (> pi/2)")->required();
  wing->add_option("--L", wo.L, "x1 half-extent")->capture_default_str();
  wing->add_option("--delta", wo.delta, "Truncation distance")->capture_default_str();
  wing->add_option("--h-coarse", wo.h_coarse)->capture_default_str();
  wing->add_option("--t-coarse", wo.t_coarse)->capture_default_str();
  wing->add_option("--t-fine", wo.t_fine)->capture_default_str();
  wing->callback([&] {
    if (!g.out) throw CLI::RequiredError("--out");
    if (g.h) wo.h_fine = *g.h;
    mcf_profile* p = nullptr;
    mcf_wing_report rep{};
    if (auto s = mcf_extract_wing(wing_b, &wo, &p, &rep); s != MCF_OK) {
      code = report_error(s);
      return;
    }
    if (!g.quiet)
      std::printf("certified=%d residual=%.3g max_slope=%.6g far_slope=%.3g symmetry=%.3g rate=%.3g\n",
                  rep.certified, rep.residual, rep.max_slope, rep.far_slope, rep.symmetry_error,
                  rep.fine_rate);
    code = save_and_describe(g, p);
    if (code == 0 && !rep.certified) code = 1;
  });

  std::vector<double> window;
  bool fit_c1 = false;
  double c1_half = 0.5;
  auto* fit = app.add_subcommand("fit", "Fit field tables against a profile table");
  fit->add_option("trajectory", trajectory, "Table file or directory of *.table")->required();
  fit->add_option("profile", profile, "Profile table")->required()->check(CLI::ExistingFile);
  fit->add_option("--window", window, "x1_lo x1_hi [x2_lo x2_hi]")->expected(2, 4);
  fit->add_flag("--c1", fit_c1, "Also fit the x1 shift");
  fit->add_option("--c1-half-width", c1_half)->capture_default_str();
  fit->callback([&] {
    if (!window.empty() && window.size() != 2 && window.size() != 4)
      throw CLI::ValidationError("--window", "expects 2 or 4 numbers");
    window.resize(4, 0.0);
    std::FILE* f = stdout;
    if (g.out && !(f = std::fopen(g.out->c_str(), "w"))) {
      std::cerr << "error: cannot write " << *g.out << '\n';
      code = 2;
      return;
    }
    std::fprintf(f, "t,c0,c1,residual,sup_dist\n");
    const bool has_window = window[0] != window[1];
    const mcf_status s = mcf_fit(trajectory.c_str(), profile.c_str(), has_window ? window.data() : nullptr,
                                 fit_c1 ? 1 : 0, c1_half, print_fit, f);
    if (f != stdout) std::fclose(f);
    code = s == MCF_OK ? 0 : report_error(s);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return code;
}
