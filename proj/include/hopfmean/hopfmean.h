/* C interface for the hopfmean library: Hopf bifurcation location,
 * normal-form coefficients, analytic limit-cycle mean predictions, and
 * direct numerical cycle measurement for parameterized ODE systems.
 *
 * All functions returning pointers yield NULL on failure; all functions
 * returning int yield 0 (HM_OK) on success and a negative error code
 * otherwise. hm_last_error() describes the most recent failure on the
 * calling thread. Handles are not thread-safe individually, but
 * distinct handles may be used from distinct threads concurrently.
 */
#ifndef HOPFMEAN_H
#define HOPFMEAN_H

#ifdef __cplusplus
extern "C" {
#endif

#define HM_OK 0
#define HM_ERR_INVALID -1    /* bad arguments or model definition */
#define HM_ERR_SOLVE -2      /* Newton/eigen/normal-form failure */
#define HM_ERR_DEGENERATE -3 /* degenerate Lyapunov coefficient */
#define HM_ERR_BRACKET -4    /* no sign change of mu on the interval */
#define HM_ERR_NUMERIC -5    /* integration failure */

typedef struct hm_model hm_model;
typedef struct hm_result hm_result;

const char* hm_version(void);

/* Message for the last error on this thread; empty string if none. */
const char* hm_last_error(void);

/* Code for the last error on this thread; HM_OK if none. */
int hm_last_error_code(void);

/* Built-in registry: "predator-prey", "brusselator", "wilson-cowan",
 * "feedback-control". */
hm_model* hm_model_builtin(const char* name);

/* Custom model from a JSON definition:
 * { "dimension": n, "parameters": {"name": value, ...},
 *   "bifurcation_parameter": "...", "equations": ["...", ...] } */
hm_model* hm_model_from_json(const char* json_text);
hm_model* hm_model_from_file(const char* path);
void hm_model_free(hm_model* m);

int hm_model_dimension(const hm_model* m);
const char* hm_model_name(const hm_model* m);
const char* hm_model_bifurcation_parameter(const hm_model* m);
int hm_model_set_param(hm_model* m, const char* name, double value);

/* Equilibrium guess used when an operation receives guess == NULL.
 * Built-ins have model-specific defaults; custom models use zeros.
 * `out` must hold dimension() doubles. */
int hm_model_default_guess(const hm_model* m, double alpha, double* out);

/* Equilibrium + eigenpair + normal form + mean prediction at one alpha. */
hm_result* hm_analyze(const hm_model* m, double alpha, const double* guess);

/* Bifurcation point on [alpha_lo, alpha_hi] (mu must change sign),
 * including mu', Re(c1), criticality, K at alpha*, and the gain jump. */
hm_result* hm_locate(const hm_model* m, double alpha_lo, double alpha_hi, const double* guess);

/* Numerical cycle observation at one alpha plus comparison against the
 * analytic prediction. rtol/atol <= 0 select the defaults. */
hm_result* hm_observe(const hm_model* m, double alpha, const double* guess, double rtol,
                      double atol);

/* Results are JSON documents; scalar/vector accessors address top-level
 * keys. hm_result_vector returns the length (<= cap values copied), or
 * a negative error code. */
const char* hm_result_json(const hm_result* r);
int hm_result_scalar(const hm_result* r, const char* key, double* out);
int hm_result_vector(const hm_result* r, const char* key, double* out, int cap);
void hm_result_free(hm_result* r);

#ifdef __cplusplus
}
#endif

#endif /* HOPFMEAN_H */
