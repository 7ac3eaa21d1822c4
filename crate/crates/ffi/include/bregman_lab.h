#ifndef BREGMAN_LAB_H
#define BREGMAN_LAB_H

/* Generated by this crate's build script from the Rust source; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible entry point. `BM_STATUS_OK` is zero;
 * anything else leaves a description in [`bm_last_error_message`].
 */
typedef enum {
  BM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BM_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  BM_STATUS_INVALID_UTF8 = 2,
  /**
   * The input parsed but described something the library rejects.
   */
  BM_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A coordinate buffer length disagrees with the handle's dimension.
   */
  BM_STATUS_DIMENSION_MISMATCH = 4,
  /**
   * A point fell outside the function's effective domain.
   */
  BM_STATUS_OUTSIDE_DOMAIN = 5,
  /**
   * The filesystem said no.
   */
  BM_STATUS_IO = 6,
  /**
   * A check or iteration failed at runtime (budget, escape, panic, ...).
   */
  BM_STATUS_RUNTIME_ERROR = 7,
} BmStatus;

/**
 * Opaque convex-function handle; create with [`bm_function_create`],
 * release with [`bm_function_free`].
 */
typedef struct BmFunction BmFunction;

/**
 * Opaque prepared scenario; create with [`bm_scenario_load_json`] or
 * [`bm_scenario_load_file`], release with [`bm_scenario_free`].
 */
typedef struct BmScenario BmScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *bm_version(void);

/**
 * Message describing the most recent failure on the calling thread (empty
 * string if none). The pointer stays valid until the next failing call on
 * the same thread; copy it if you need to keep it.
 */
const char *bm_last_error_message(void);

/**
 * Builds a convex-function handle from a JSON spec, e.g.
 * `{"kind":"squared_norm","dim":2}` or
 * `{"kind":"negative_entropy","dim":2,"lo":0.1,"hi":10.0}`.
 * On success writes a new handle to `out`.
 *
 * # Safety
 * `spec_json` must be a valid NUL-terminated string and `out` a valid
 * pointer to pointer storage.
 */
BmStatus bm_function_create(const char *spec_json, BmFunction **out);

/**
 * Dimension of the function's argument space; 0 for a null handle.
 *
 * # Safety
 * `function` must be null or a live handle from [`bm_function_create`].
 */
size_t bm_function_dim(const BmFunction *function);

/**
 * Evaluates the function at `x` (a buffer of `dim` doubles), writing the
 * finite value to `value_out`. Points outside the effective domain yield
 * `BM_STATUS_OUTSIDE_DOMAIN`.
 *
 * # Safety
 * `function` must be a live handle, `x` must point at `dim` readable
 * doubles, and `value_out` at writable storage for one double.
 */
BmStatus bm_function_eval(const BmFunction *function,
                          const double *x,
                          size_t dim,
                          double *value_out);

/**
 * Writes the gradient at `x` into `grad_out` (a buffer of `dim` doubles).
 * Points outside the domain interior yield `BM_STATUS_OUTSIDE_DOMAIN`.
 *
 * # Safety
 * `function` must be a live handle, `x` must point at `dim` readable
 * doubles, and `grad_out` at `dim` writable doubles.
 */
BmStatus bm_function_grad(const BmFunction *function,
                          const double *x,
                          size_t dim,
                          double *grad_out);

/**
 * Divergence of the function between `y` and `x` (the gap at `y` of the
 * linearization taken at `x`), written to `value_out`.
 *
 * # Safety
 * `function` must be a live handle; `y` and `x` must each point at `dim`
 * readable doubles, and `value_out` at writable storage for one double.
 */
BmStatus bm_bregman(const BmFunction *function,
                    const double *y,
                    const double *x,
                    size_t dim,
                    double *value_out);

/**
 * Releases a function handle. Null is a no-op.
 *
 * # Safety
 * `function` must be null or a handle from [`bm_function_create`] that has
 * not been freed yet.
 */
void bm_function_free(BmFunction *function);

/**
 * Parses and prepares a scenario from JSON text. On success writes a new
 * handle to `out`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer
 * to pointer storage.
 */
BmStatus bm_scenario_load_json(const char *text, BmScenario **out);

/**
 * Loads a scenario from a file path, falling back to the built-in registry
 * when no such file exists (so `"contraction"` works without a file).
 *
 * # Safety
 * `source` must be a valid NUL-terminated string and `out` a valid pointer
 * to pointer storage.
 */
BmStatus bm_scenario_load_file(const char *source, BmScenario **out);

/**
 * Runs every check in the scenario. `seed` may be null (use the scenario's
 * own seed) or point at a replacement. On success writes the full JSON
 * report to `report_json_out` (release with [`bm_string_free`]) and, when
 * `all_passed_out` is non-null, whether every run met its expectation.
 *
 * # Safety
 * `scenario` must be a live handle; `seed` must be null or point at a
 * readable u64; `report_json_out` must be a valid pointer to pointer
 * storage; `all_passed_out` must be null or writable.
 */
BmStatus bm_scenario_run(const BmScenario *scenario,
                         const uint64_t *seed,
                         char **report_json_out,
                         bool *all_passed_out);

/**
 * Releases a scenario handle. Null is a no-op.
 *
 * # Safety
 * `scenario` must be null or a handle from one of the loaders that has not
 * been freed yet.
 */
void bm_scenario_free(BmScenario *scenario);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `text` must be null or a string handed out by this library that has not
 * been freed yet.
 */
void bm_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BREGMAN_LAB_H */
