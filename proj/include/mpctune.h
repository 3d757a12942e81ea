/* mpctune - closed-loop MPC back-off tuning via Gaussian-process Bayesian
 * optimization, with a bundled central-plant MPC simulator.
 *
 * C API over the C++ core: opaque handles, integer status codes, thread-local
 * error messages. Every function returning int yields MPCTUNE_OK (0) on
 * success; on failure, mpctune_last_error() describes what went wrong.
 * Handles are freed with the matching *_free call; freeing NULL is a no-op.
 */
#ifndef MPCTUNE_H
#define MPCTUNE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef MPCTUNE_API
#define MPCTUNE_API __attribute__((visibility("default")))
#endif

/* Status codes. The CLI maps these directly to process exit codes. */
typedef enum mpctune_status {
  MPCTUNE_OK = 0,
  MPCTUNE_ERR_ARGUMENT = 1, /* null handle, bad argument, out-of-domain query */
  MPCTUNE_ERR_CONFIG = 2,   /* unreadable/invalid configuration or data file */
  MPCTUNE_ERR_NUMERIC = 3,  /* LP/factorization/simulation failure */
  MPCTUNE_ERR_PARTIAL = 4   /* operation finished with holes; partial output exists */
} mpctune_status;

typedef struct mpctune_config mpctune_config;  /* plant + simulation + tuning defaults */
typedef struct mpctune_series mpctune_series;  /* realized disturbances + forecasts */
typedef struct mpctune_result mpctune_result;  /* closed-loop simulation result */
typedef struct mpctune_grid mpctune_grid;      /* cost surface on a back-off grid */
typedef struct mpctune_trace mpctune_trace;    /* tuning run trace */

MPCTUNE_API const char* mpctune_version(void);

/* Message for the most recent failure on this thread. Never NULL. */
MPCTUNE_API const char* mpctune_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* Parses a key = value config file; errors carry file:line positions. */
MPCTUNE_API int mpctune_config_load(const char* path, mpctune_config** out);

/* Built-in synthetic desk-scale plant. */
MPCTUNE_API int mpctune_config_default(mpctune_config** out);

MPCTUNE_API int mpctune_config_write(const mpctune_config* cfg, const char* path);
MPCTUNE_API int mpctune_config_set_horizon(mpctune_config* cfg, int hours);
MPCTUNE_API int mpctune_config_get_horizon(const mpctune_config* cfg, int* out);
MPCTUNE_API int mpctune_config_hash(const mpctune_config* cfg, uint64_t* out);
MPCTUNE_API void mpctune_config_free(mpctune_config* cfg);

/* --- disturbance series -------------------------------------------------- */

/* CSV columns: hour, L_e, L_cw, L_hw, price_e. Forecasts are derived using
 * the config's forecast_noise_std / forecast_seed. */
MPCTUNE_API int mpctune_series_load_csv(const char* path, const mpctune_config* cfg,
                                        mpctune_series** out);

/* Synthetic desk-scale profiles (daily/weekly shapes, seeded jitter). */
MPCTUNE_API int mpctune_series_generate(const mpctune_config* cfg, long hours, uint64_t seed,
                                        mpctune_series** out);

MPCTUNE_API int mpctune_series_write_csv(const mpctune_series* s, const char* path);
MPCTUNE_API int mpctune_series_hours(const mpctune_series* s, long* out);
MPCTUNE_API int mpctune_series_hash(const mpctune_series* s, uint64_t* out);
MPCTUNE_API void mpctune_series_free(mpctune_series* s);

/* --- closed-loop simulation ---------------------------------------------- */

/* Receding-horizon closed loop over span_hours; beta_* are the storage
 * back-off fractions in [0, 0.5]. The series must cover span + horizon. */
MPCTUNE_API int mpctune_simulate(const mpctune_config* cfg, const mpctune_series* s,
                                 double beta_cw, double beta_hw, long span_hours,
                                 mpctune_result** out);

MPCTUNE_API int mpctune_result_total_cost(const mpctune_result* r, double* out);
MPCTUNE_API int mpctune_result_breakdown(const mpctune_result* r, double* electricity,
                                         double* demand, double* water, double* gas,
                                         double* slack_penalty);
MPCTUNE_API int mpctune_result_violations(const mpctune_result* r, long* out);

/* Writes result.json, hourly.csv, weekly.csv, violations.csv into dir. */
MPCTUNE_API int mpctune_result_write(const mpctune_result* r, const char* dir);
MPCTUNE_API void mpctune_result_free(mpctune_result* r);

/* --- cost grid ------------------------------------------------------------ */

/* Simulates every knot combination (knots strictly increasing in [0, 0.5]).
 * parallel > 1 fans cells out over threads. Returns MPCTUNE_ERR_PARTIAL with
 * *out still set when some cells failed. */
MPCTUNE_API int mpctune_grid_build(const mpctune_config* cfg, const mpctune_series* s,
                                   const double* knots_cw, int n_cw, const double* knots_hw,
                                   int n_hw, long span_hours, int parallel, mpctune_grid** out);

MPCTUNE_API int mpctune_grid_save(const mpctune_grid* g, const char* path);
MPCTUNE_API int mpctune_grid_write_csv(const mpctune_grid* g, const char* path);
MPCTUNE_API int mpctune_grid_load(const char* path, mpctune_grid** out);

/* Verifies stored provenance hashes against the active config (and series if
 * non-NULL); MPCTUNE_ERR_CONFIG on mismatch. */
MPCTUNE_API int mpctune_grid_check(const mpctune_grid* g, const mpctune_config* cfg,
                                   const mpctune_series* s);

/* Bilinear interpolation inside the knot hull; exact at knots. */
MPCTUNE_API int mpctune_grid_value(const mpctune_grid* g, double beta_cw, double beta_hw,
                                   double* out);
MPCTUNE_API int mpctune_grid_min(const mpctune_grid* g, double* beta_cw, double* beta_hw,
                                 double* value);
MPCTUNE_API int mpctune_grid_complete(const mpctune_grid* g, int* out);
MPCTUNE_API void mpctune_grid_free(mpctune_grid* g);

/* --- tuning ---------------------------------------------------------------- */

typedef struct mpctune_bo_options {
  double kappa;        /* confidence-bound weight, >= 0 */
  int n_init;          /* initial Latin-hypercube design size, >= 1 */
  int max_iter;        /* adaptive iterations, >= 1 */
  int restarts;        /* acquisition multi-start count, >= 1 */
  uint64_t seed;
  double lengthscale;  /* kernel, in normalized tuning-box units */
  double nu;           /* 0.5, 1.5 or 2.5 */
  double noise;        /* observation noise variance */
} mpctune_bo_options;

/* Fills defaults; when cfg is non-NULL its bo.* settings are used. */
MPCTUNE_API int mpctune_bo_options_init(const mpctune_config* cfg, mpctune_bo_options* out);

/* Black-box objective: x has `dim` entries in physical coordinates. Return a
 * finite value; a non-finite value aborts the run with a partial trace. */
typedef double (*mpctune_objective_fn)(const double* x, int dim, void* user);

/* Generic tuning over box bounds. Returns MPCTUNE_ERR_PARTIAL with *out set
 * if the objective aborted mid-run. */
MPCTUNE_API int mpctune_tune_callback(mpctune_objective_fn fn, void* user, const double* lower,
                                      const double* upper, int dim,
                                      const mpctune_bo_options* opts, mpctune_trace** out);

/* Tuning against a frozen cost grid (bounds = knot hull). */
MPCTUNE_API int mpctune_tune_grid(const mpctune_grid* g, const mpctune_bo_options* opts,
                                  mpctune_trace** out);

/* Tuning with live closed-loop simulations (bounds = [0, 0.5]^2). */
MPCTUNE_API int mpctune_tune_live(const mpctune_config* cfg, const mpctune_series* s,
                                  long span_hours, const mpctune_bo_options* opts,
                                  mpctune_trace** out);

/* Tuning on a named validation surface over [0,1]^2: "quadratic",
 * "two_minima" or "constant". */
MPCTUNE_API int mpctune_tune_synthetic(const char* name, const mpctune_bo_options* opts,
                                       mpctune_trace** out);

MPCTUNE_API int mpctune_trace_size(const mpctune_trace* t, int* out);
MPCTUNE_API int mpctune_trace_dim(const mpctune_trace* t, int* out);

/* x must have room for trace dim entries. */
MPCTUNE_API int mpctune_trace_sample(const mpctune_trace* t, int i, double* x, double* value,
                                     double* best_so_far);
MPCTUNE_API int mpctune_trace_best(const mpctune_trace* t, double* x, double* value);
MPCTUNE_API int mpctune_trace_aborted(const mpctune_trace* t, int* out);

/* Writes trace.json + trace.csv (and gp_snapshots.csv when requested). */
MPCTUNE_API int mpctune_trace_write(const mpctune_trace* t, const char* dir,
                                    int with_gp_snapshots);
MPCTUNE_API void mpctune_trace_free(mpctune_trace* t);

#ifdef __cplusplus
}
#endif

#endif /* MPCTUNE_H */
