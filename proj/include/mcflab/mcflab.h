#ifndef MCFLAB_H
#define MCFLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MCF_API __declspec(dllexport)
#else
#define MCF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns MCF_OK or an error code; the message of the most recent
   failure on the calling thread is available from mcf_last_error(). */
typedef enum mcf_status {
  MCF_OK = 0,
  MCF_INVALID_ARGUMENT = 1,
  MCF_DOMAIN_ERROR = 2,
  MCF_CONFIG_ERROR = 3,
  MCF_IO_ERROR = 4,
  MCF_CFL_VIOLATION = 5,
  MCF_SOLVER_ABORT = 6,
  MCF_NOT_CONVERGED = 7,
  MCF_INTERNAL = 99
} mcf_status;

typedef enum mcf_check_status {
  MCF_CHECK_PASS = 0,
  MCF_CHECK_FAIL = 1,
  MCF_CHECK_INCONCLUSIVE = 2
} mcf_check_status;

typedef struct mcf_scenario mcf_scenario;
typedef struct mcf_report mcf_report;
typedef struct mcf_profile mcf_profile;
typedef struct mcf_sweep mcf_sweep;

MCF_API const char* mcf_last_error(void);
MCF_API const char* mcf_status_name(mcf_status s);

/* ---- scenarios ---------------------------------------------------------- */

typedef struct mcf_overrides {
  int has_h;
  double h;
  int has_t_end;
  double t_end;
  int has_seed;
  uint64_t seed;
  const char* out_dir; /* parent directory, NULL keeps the config's */
} mcf_overrides;

MCF_API mcf_status mcf_scenario_load(const char* path, mcf_scenario** out);
MCF_API mcf_status mcf_scenario_parse(const char* yaml, mcf_scenario** out);
MCF_API void mcf_scenario_free(mcf_scenario* s);
MCF_API mcf_status mcf_scenario_apply(mcf_scenario* s, const mcf_overrides* ov);
/* Owned by the handle, valid until the next call on it. */
MCF_API const char* mcf_scenario_name(const mcf_scenario* s);
MCF_API const char* mcf_scenario_yaml(mcf_scenario* s);

/* A solver abort is not an error here: the report carries exit code 3. */
MCF_API mcf_status mcf_run(const mcf_scenario* s, mcf_report** out);

MCF_API void mcf_report_free(mcf_report* r);
/* 0 all checks pass, 1 a check failed or was inconclusive, 3 solver abort. */
MCF_API int mcf_report_exit_code(const mcf_report* r);
MCF_API size_t mcf_report_check_count(const mcf_report* r);
MCF_API mcf_status mcf_report_check(const mcf_report* r, size_t i, const char** name,
                                    mcf_check_status* status, double* value,
                                    const char** detail);
MCF_API mcf_status mcf_report_constant(const mcf_report* r, const char* name, double* value);
MCF_API size_t mcf_report_constant_count(const mcf_report* r);
MCF_API mcf_status mcf_report_constant_at(const mcf_report* r, size_t i, const char** name,
                                          double* value);
/* which: "csv", "table", "summary", "config". */
MCF_API const char* mcf_report_path(const mcf_report* r, const char* which);
MCF_API const char* mcf_report_abort_reason(const mcf_report* r);
MCF_API size_t mcf_report_record_count(const mcf_report* r);
/* Fills the 11 CSV columns of snapshot i, in CSV order. */
MCF_API mcf_status mcf_report_record(const mcf_report* r, size_t i, double row[11]);

/* ---- sweeps -------------------------------------------------------------- */

MCF_API mcf_status mcf_sweep_dir(const char* dir, const mcf_overrides* ov, mcf_sweep** out);
MCF_API void mcf_sweep_free(mcf_sweep* s);
MCF_API int mcf_sweep_exit_code(const mcf_sweep* s);
MCF_API size_t mcf_sweep_count(const mcf_sweep* s);
MCF_API mcf_status mcf_sweep_row(const mcf_sweep* s, size_t i, const char** name,
                                 int* exit_code, int* passed, int* failed, const char** error);
MCF_API mcf_status mcf_sweep_write(const mcf_sweep* s, const char* path);

/* ---- invariant suites ---------------------------------------------------- */

typedef void (*mcf_line_fn)(const char* line, void* user);

MCF_API mcf_status mcf_check_suite(const char* suite, mcf_line_fn fn, void* user, int* failures);

/* ---- profiles ------------------------------------------------------------ */

MCF_API mcf_status mcf_profile_bowl(int n, double r_max, double h, mcf_profile** out);
/* Tilted grim reaper plane sampled on [-L, L] x [-(b - delta), b - delta]. */
MCF_API mcf_status mcf_profile_tilted(double b, double L, double delta, double h,
                                      mcf_profile** out);
MCF_API mcf_status mcf_profile_load(const char* path, mcf_profile** out);
MCF_API mcf_status mcf_profile_save(const mcf_profile* p, const char* path);
MCF_API void mcf_profile_free(mcf_profile* p);
MCF_API mcf_status mcf_profile_eval(const mcf_profile* p, double x1, double x2, double* u);
MCF_API double mcf_profile_residual_sup(const mcf_profile* p);
MCF_API const char* mcf_profile_kind(const mcf_profile* p);

typedef struct mcf_wing_options {
  double L;
  double delta;
  double h_coarse;
  double h_fine;
  double t_coarse;
  double t_fine;
} mcf_wing_options;

typedef struct mcf_wing_report {
  int certified;
  double residual;
  double max_slope;
  double far_slope;
  double symmetry_error;
  double coarse_rate;
  double fine_rate;
} mcf_wing_report;

MCF_API void mcf_wing_options_default(mcf_wing_options* o);
MCF_API mcf_status mcf_extract_wing(double b, const mcf_wing_options* o, mcf_profile** out,
                                    mcf_wing_report* report);

/* ---- fitting ------------------------------------------------------------- */

typedef void (*mcf_fit_fn)(double t, double c0, double c1, double residual, double sup_dist,
                           void* user);

/* Fits a field table, or every *.table file of a directory, against a
   profile table. window is {x1_lo, x1_hi, x2_lo, x2_hi} or NULL for the
   central half of each axis. */
MCF_API mcf_status mcf_fit(const char* trajectory, const char* profile_path,
                           const double* window, int fit_c1, double c1_half_width,
                           mcf_fit_fn fn, void* user);

#ifdef __cplusplus
}
#endif

#endif
