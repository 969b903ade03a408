/* idel — integral delay equations and first-order hyperbolic transport.
 *
 * C interface to the idel shared library: opaque handles, integer status
 * codes, thread-local error text. All functions returning idel_status set
 * idel_last_error() on failure.
 */
#ifndef IDEL_H
#define IDEL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct idel_system idel_system;         /* an IDE system description */
typedef struct idel_fn idel_fn;                 /* a sampled (cell) function */
typedef struct idel_trajectory idel_trajectory; /* a solved trajectory */

typedef enum {
    IDEL_OK = 0,
    IDEL_EINVAL = 1,      /* bad argument / malformed input */
    IDEL_EVALIDATION = 2, /* configuration rejected */
    IDEL_EESCAPE = 3,     /* solution crossed the blow-up threshold */
    IDEL_ECERT = 4,       /* certificate violated or unusable */
    IDEL_EIO = 5,         /* filesystem failure */
    IDEL_EINTERNAL = 6
} idel_status;

const char* idel_version(void);

/* Thread-local text for the most recent failure in this thread. */
const char* idel_last_error(void);

/* ---- sampled functions -------------------------------------------------- */

/* Piecewise-constant function on [t_start, t_start + count*step) with values
 * in R^dim; `values` holds count*dim doubles, cell-major. */
idel_status idel_fn_create(double t_start, double step, long long count, int dim,
                           const double* values, idel_fn** out);
idel_status idel_fn_constant(double t_start, double t_end, double step, int dim,
                             const double* value, idel_fn** out);
void idel_fn_free(idel_fn* fn);

long long idel_fn_count(const idel_fn* fn);
int idel_fn_dim(const idel_fn* fn);
double idel_fn_t_start(const idel_fn* fn);
double idel_fn_step(const idel_fn* fn);
/* Copies count*dim doubles into buf (cap = capacity in doubles). */
idel_status idel_fn_values(const idel_fn* fn, double* buf, long long cap);
double idel_fn_sup_norm(const idel_fn* fn);
/* Exact integral of the cell function over [a, b]; out has dim entries. */
idel_status idel_fn_integrate(const idel_fn* fn, double a, double b, double* out);
/* CSV with header t_lo,t_hi,v_1..v_n at full precision. */
idel_status idel_fn_write_csv(const idel_fn* fn, const char* path);

/* ---- systems ------------------------------------------------------------ */

/* Parse a system descriptor (JSON). Hyperbolic descriptors are converted to
 * their closure IDE. */
idel_status idel_system_parse(const char* json_text, idel_system** out);
void idel_system_free(idel_system* sys);

int idel_system_dim(const idel_system* sys);
double idel_system_delay(const idel_system* sys);
int idel_system_input_dim(const idel_system* sys);

/* f(x_t, w_t): history covers [t-r, t), input covers [t-r, t]; out has
 * idel_system_dim entries. */
idel_status idel_eval_rhs(const idel_system* sys, const idel_fn* history,
                          const idel_fn* input, double* out);

/* ---- solving ------------------------------------------------------------ */

/* Successive-approximation solve on [t0, t0 + horizon); x0 is the history on
 * [t0 - r, t0), input must cover [t0 - r, t0 + horizon). tol <= 0 picks the
 * default 1e-12. */
idel_status idel_solve(const idel_system* sys, const idel_fn* x0, const idel_fn* input,
                       double horizon, double tol, idel_trajectory** out);
void idel_trajectory_free(idel_trajectory* traj);

/* Borrowed reference, valid while the trajectory lives. */
const idel_fn* idel_trajectory_solution(const idel_trajectory* traj);
double idel_trajectory_t_max(const idel_trajectory* traj);
int idel_trajectory_escaped(const idel_trajectory* traj);
double idel_trajectory_max_contraction(const idel_trajectory* traj);
/* One "window k: R=..., delta=..., sweeps=..., factor=..." line per window. */
idel_status idel_trajectory_diag(const idel_trajectory* traj, char** text);

/* ---- verification and scenarios ------------------------------------------ */

/* Razumikhin falsification; report is a JSON document (free with
 * idel_string_free). Returns IDEL_ECERT when a violation was found. */
idel_status idel_check_razumikhin(const idel_system* sys, const char* cert_json,
                                  int samples, unsigned long long seed, char** report_json);

/* Run a scenario document; artifacts are written under out_dir. Returns the
 * CLI exit code: 0 ok, 2 validation, 3 escape, 4 violation. */
int idel_run_scenario(const char* scenario_json, const char* out_dir);

void idel_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* IDEL_H */
