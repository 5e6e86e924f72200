#include "mcflab/mcflab.h"

#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "mcflab/error.hpp"
#include "mcflab/experiments.hpp"
#include "mcflab/profile_io.hpp"

struct mcf_scenario {
  mcf::ScenarioConfig cfg;
  std::string yaml;
};

struct mcf_report {
  mcf::ReportBundle bundle;
};

struct mcf_profile {
  std::shared_ptr<const mcf::TranslatorProfile> p;
  std::string kind;
};

struct mcf_sweep {
  mcf::SweepSummary summary;
};

namespace {

thread_local std::string g_last_error;

mcf_status to_status(mcf::ErrorCode c) {
  switch (c) {
    case mcf::ErrorCode::invalid_argument: return MCF_INVALID_ARGUMENT;
    case mcf::ErrorCode::domain_error: return MCF_DOMAIN_ERROR;
    case mcf::ErrorCode::config_error: return MCF_CONFIG_ERROR;
    case mcf::ErrorCode::io_error: return MCF_IO_ERROR;
    case mcf::ErrorCode::cfl_violation: return MCF_CFL_VIOLATION;
    case mcf::ErrorCode::solver_abort: return MCF_SOLVER_ABORT;
    case mcf::ErrorCode::not_converged: return MCF_NOT_CONVERGED;
  }
  return MCF_INTERNAL;
}

// Runs f, translating exceptions into status codes.
template <class F>
mcf_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MCF_OK;
  } catch (const mcf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return MCF_INTERNAL;
}

mcf_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return MCF_INVALID_ARGUMENT;
}

mcf::RunOverrides to_overrides(const mcf_overrides* ov) {
  mcf::RunOverrides r;
  if (!ov) return r;
  if (ov->has_h) r.h = ov->h;
  if (ov->has_t_end) r.t_end = ov->t_end;
  if (ov->has_seed) r.seed = ov->seed;
  if (ov->out_dir) r.out_dir = std::string(ov->out_dir);
  return r;
}

}  // namespace

extern "C" {

const char* mcf_last_error(void) { return g_last_error.c_str(); }

const char* mcf_status_name(mcf_status s) {
  switch (s) {
    case MCF_OK: return "ok";
    case MCF_INVALID_ARGUMENT: return "invalid_argument";
    case MCF_DOMAIN_ERROR: return "domain_error";
    case MCF_CONFIG_ERROR: return "config_error";
    case MCF_IO_ERROR: return "io_error";
    case MCF_CFL_VIOLATION: return "cfl_violation";
    case MCF_SOLVER_ABORT: return "solver_abort";
    case MCF_NOT_CONVERGED: return "not_converged";
    case MCF_INTERNAL: return "internal";
  }
  return "unknown";
}

// ---- scenarios

mcf_status mcf_scenario_load(const char* path, mcf_scenario** out) {
  if (!path || !out) return null_arg("path/out");
  *out = nullptr;
  return guard([&] {
    auto s = std::make_unique<mcf_scenario>();
    s->cfg = mcf::load_scenario(path);
    *out = s.release();
  });
}

mcf_status mcf_scenario_parse(const char* yaml, mcf_scenario** out) {
  if (!yaml || !out) return null_arg("yaml/out");
  *out = nullptr;
  return guard([&] {
    auto s = std::make_unique<mcf_scenario>();
    s->cfg = mcf::parse_scenario(yaml);
    *out = s.release();
  });
}

void mcf_scenario_free(mcf_scenario* s) { delete s; }

mcf_status mcf_scenario_apply(mcf_scenario* s, const mcf_overrides* ov) {
  if (!s) return null_arg("scenario");
  return guard([&] {
    mcf::ScenarioConfig c = s->cfg;
    mcf::apply_overrides(c, to_overrides(ov));
    s->cfg = std::move(c);
  });
}

const char* mcf_scenario_name(const mcf_scenario* s) { return s ? s->cfg.name.c_str() : ""; }

const char* mcf_scenario_yaml(mcf_scenario* s) {
  if (!s) return "";
  s->yaml = mcf::dump_scenario(s->cfg);
  return s->yaml.c_str();
}

mcf_status mcf_run(const mcf_scenario* s, mcf_report** out) {
  if (!s || !out) return null_arg("scenario/out");
  *out = nullptr;
  return guard([&] {
    auto r = std::make_unique<mcf_report>();
    r->bundle = mcf::run_scenario(s->cfg);
    *out = r.release();
  });
}

void mcf_report_free(mcf_report* r) { delete r; }

int mcf_report_exit_code(const mcf_report* r) { return r ? r->bundle.exit_code() : 2; }

size_t mcf_report_check_count(const mcf_report* r) { return r ? r->bundle.checks.size() : 0; }

mcf_status mcf_report_check(const mcf_report* r, size_t i, const char** name,
                            mcf_check_status* status, double* value, const char** detail) {
  if (!r) return null_arg("report");
  if (i >= r->bundle.checks.size()) {
    g_last_error = "check index out of range";
    return MCF_INVALID_ARGUMENT;
  }
  const auto& c = r->bundle.checks[i];
  if (name) *name = c.name.c_str();
  if (status) *status = static_cast<mcf_check_status>(static_cast<int>(c.status));
  if (value) *value = c.value;
  if (detail) *detail = c.detail.c_str();
  return MCF_OK;
}

mcf_status mcf_report_constant(const mcf_report* r, const char* name, double* value) {
  if (!r || !name || !value) return null_arg("report/name/value");
  const auto v = r->bundle.constant(name);
  if (!v) {
    g_last_error = std::string("no constant named ") + name;
    return MCF_INVALID_ARGUMENT;
  }
  *value = *v;
  return MCF_OK;
}

size_t mcf_report_constant_count(const mcf_report* r) { return r ? r->bundle.constants.size() : 0; }

mcf_status mcf_report_constant_at(const mcf_report* r, size_t i, const char** name, double* value) {
  if (!r) return null_arg("report");
  if (i >= r->bundle.constants.size()) {
    g_last_error = "constant index out of range";
    return MCF_INVALID_ARGUMENT;
  }
  if (name) *name = r->bundle.constants[i].first.c_str();
  if (value) *value = r->bundle.constants[i].second;
  return MCF_OK;
}

const char* mcf_report_path(const mcf_report* r, const char* which) {
  if (!r || !which) return "";
  const std::string w = which;
  if (w == "csv") return r->bundle.csv_path.c_str();
  if (w == "table") return r->bundle.table_path.c_str();
  if (w == "summary") return r->bundle.summary_path.c_str();
  if (w == "config") return r->bundle.config_path.c_str();
  return "";
}

const char* mcf_report_abort_reason(const mcf_report* r) {
  return r ? r->bundle.abort_reason.c_str() : "";
}

size_t mcf_report_record_count(const mcf_report* r) { return r ? r->bundle.records.size() : 0; }

mcf_status mcf_report_record(const mcf_report* r, size_t i, double row[11]) {
  if (!r || !row) return null_arg("report/row");
  if (i >= r->bundle.records.size()) {
    g_last_error = "record index out of range";
    return MCF_INVALID_ARGUMENT;
  }
  const auto& d = r->bundle.records[i];
  const double v[11] = {d.t,      d.sup_dist, d.I_total,      d.sup_kappa,       d.phi,
                        d.c0_fit, d.c1_fit,   d.fit_residual, d.harnack_min,     d.convexity_margin,
                        d.squeeze_violation};
  for (int k = 0; k < 11; ++k) row[k] = v[k];
  return MCF_OK;
}

// ---- sweeps

mcf_status mcf_sweep_dir(const char* dir, const mcf_overrides* ov, mcf_sweep** out) {
  if (!dir || !out) return null_arg("dir/out");
  *out = nullptr;
  return guard([&] {
    auto s = std::make_unique<mcf_sweep>();
    s->summary = mcf::sweep_directory(dir, to_overrides(ov));
    *out = s.release();
  });
}

void mcf_sweep_free(mcf_sweep* s) { delete s; }

int mcf_sweep_exit_code(const mcf_sweep* s) { return s ? s->summary.exit_code() : 2; }

size_t mcf_sweep_count(const mcf_sweep* s) { return s ? s->summary.rows.size() : 0; }

mcf_status mcf_sweep_row(const mcf_sweep* s, size_t i, const char** name, int* exit_code,
                         int* passed, int* failed, const char** error) {
  if (!s) return null_arg("sweep");
  if (i >= s->summary.rows.size()) {
    g_last_error = "sweep row out of range";
    return MCF_INVALID_ARGUMENT;
  }
  const auto& r = s->summary.rows[i];
  if (name) *name = r.name.c_str();
  if (exit_code) *exit_code = r.exit_code;
  if (passed) *passed = r.passed;
  if (failed) *failed = r.failed;
  if (error) *error = r.error.c_str();
  return MCF_OK;
}

mcf_status mcf_sweep_write(const mcf_sweep* s, const char* path) {
  if (!s || !path) return null_arg("sweep/path");
  return guard([&] {
    std::ofstream os(path);
    if (!os) throw mcf::Error(mcf::ErrorCode::io_error, std::string("cannot write ") + path);
    mcf::write_sweep_summary(os, s->summary);
  });
}

// ---- check suites

mcf_status mcf_check_suite(const char* suite, mcf_line_fn fn, void* user, int* failures) {
  if (!suite) return null_arg("suite");
  return guard([&] {
    std::ostringstream os;
    const int f = mcf::run_check_suite(suite, os);
    if (failures) *failures = f;
    if (fn) {
      std::istringstream is(os.str());
      for (std::string line; std::getline(is, line);) fn(line.c_str(), user);
    }
  });
}

// ---- profiles

mcf_status mcf_profile_bowl(int n, double r_max, double h, mcf_profile** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    auto p = std::make_unique<mcf_profile>();
    p->p = std::make_shared<mcf::TranslatorProfile>(mcf::bowl_profile(n, r_max, h));
    p->kind = "bowl";
    *out = p.release();
  });
}

mcf_status mcf_profile_tilted(double b, double L, double delta, double h, mcf_profile** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    mcf::require(L > 0.0 && delta > 0.0 && delta < b, "profile tilted: need L > 0 and 0 < delta < b");
    const mcf::TranslatorProfile tp = mcf::TranslatorProfile::tilted_plane(b);
    const mcf::Grid1D g1 = mcf::centered_grid(L, h), g2 = mcf::centered_grid(b - delta, h);
    mcf::Field f = mcf::Field::sample_slab(g1, g2, [&](double x1, double x2) { return tp.value(x1, x2); });
    const double res = mcf::translator_residual(f).sup_abs();
    auto p = std::make_unique<mcf_profile>();
    p->p = std::make_shared<mcf::TranslatorProfile>(
        mcf::TranslatorProfile::tabulated("tilted_plane", std::move(f), res, 2, b, tp.theta()));
    p->kind = "tilted_plane";
    *out = p.release();
  });
}

mcf_status mcf_profile_load(const char* path, mcf_profile** out) {
  if (!path || !out) return null_arg("path/out");
  *out = nullptr;
  return guard([&] {
    auto p = std::make_unique<mcf_profile>();
    p->p = std::make_shared<mcf::TranslatorProfile>(mcf::load_profile(path));
    p->kind = p->p->kind() == mcf::ProfileKind::bowl ? "bowl" : p->p->label();
    *out = p.release();
  });
}

mcf_status mcf_profile_save(const mcf_profile* p, const char* path) {
  if (!p || !path) return null_arg("profile/path");
  return guard([&] { mcf::save_profile(path, *p->p); });
}

void mcf_profile_free(mcf_profile* p) { delete p; }

mcf_status mcf_profile_eval(const mcf_profile* p, double x1, double x2, double* u) {
  if (!p || !u) return null_arg("profile/u");
  return guard([&] { *u = p->p->value(x1, x2); });
}

double mcf_profile_residual_sup(const mcf_profile* p) {
  return p ? p->p->residual_sup() : std::nan("");
}

const char* mcf_profile_kind(const mcf_profile* p) { return p ? p->kind.c_str() : ""; }

void mcf_wing_options_default(mcf_wing_options* o) {
  if (!o) return;
  const mcf::WingOptions d;
  *o = {d.L, d.delta, d.h_coarse, d.h_fine, d.t_coarse, d.t_fine};
}

mcf_status mcf_extract_wing(double b, const mcf_wing_options* o, mcf_profile** out,
                            mcf_wing_report* report) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    mcf::WingOptions w;
    if (o) {
      w.L = o->L;
      w.delta = o->delta;
      w.h_coarse = o->h_coarse;
      w.h_fine = o->h_fine;
      w.t_coarse = o->t_coarse;
      w.t_fine = o->t_fine;
    }
    const mcf::WingExtraction e = mcf::extract_delta_wing(b, w);
    if (report)
      *report = {e.certified ? 1 : 0, e.residual,    e.max_slope, e.far_slope,
                 e.symmetry_error,    e.coarse_rate, e.fine_rate};
    auto p = std::make_unique<mcf_profile>();
    p->p = e.profile;
    p->kind = e.profile->label();
    *out = p.release();
  });
}

// ---- fitting

mcf_status mcf_fit(const char* trajectory, const char* profile_path, const double* window,
                   int fit_c1, double c1_half_width, mcf_fit_fn fn, void* user) {
  if (!trajectory || !profile_path) return null_arg("trajectory/profile");
  return guard([&] {
    const mcf::TranslatorProfile prof = mcf::load_profile(profile_path);
    std::optional<mcf::FitWindow> w;
    if (window)
      w = prof.dims() == 2 ? mcf::FitWindow::slab(window[0], window[1], window[2], window[3])
                           : mcf::FitWindow::interval(window[0], window[1]);
    const auto fits = mcf::fit_tables(trajectory, prof, w, fit_c1 != 0, c1_half_width);
    if (fn)
      for (const auto& f : fits) fn(f.t, f.fit.c0, f.fit.c1, f.fit.residual, f.fit.sup_dist, user);
  });
}

}  // extern "C"
