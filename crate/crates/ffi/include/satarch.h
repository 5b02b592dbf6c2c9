#ifndef SATARCH_H
#define SATARCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum SatarchStatus {
  SATARCH_STATUS_OK = 0,
  SATARCH_STATUS_NULL_POINTER = 1,
  SATARCH_STATUS_INVALID_ARGUMENT = 2,
  SATARCH_STATUS_PARSE = 3,
  SATARCH_STATUS_IO = 4,
  SATARCH_STATUS_NUMERIC = 5,
  SATARCH_STATUS_MODEL = 6,
  SATARCH_STATUS_BUFFER_TOO_SMALL = 7,
  SATARCH_STATUS_PANIC = 8,
} SatarchStatus;

/**
 * Opaque surrogate model handle.
 */
typedef struct SatarchModel SatarchModel;

/**
 * Opaque scenario handle.
 */
typedef struct SatarchScenario SatarchScenario;

/**
 * Sized masses (kg), costs ($M) and ΔV capacity (m/s) of one design.
 */
typedef struct SatarchBreakdown {
  double m_dry;
  double m_wet;
  double m_p_des;
  double m_ps;
  double m_str;
  double m_adcs;
  double c_sat;
  double c_lau;
  double c_ioc;
  double dv_des;
} SatarchBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *satarch_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *satarch_version(void);

/**
 * Loads a built-in scenario: `"chemical"` or `"electric"`.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SatarchStatus satarch_scenario_builtin(const char *name, struct SatarchScenario **out);

/**
 * Loads and validates a scenario JSON file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SatarchStatus satarch_scenario_load(const char *path, struct SatarchScenario **out);

/**
 * Parses a scenario from a JSON string.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SatarchStatus satarch_scenario_from_json(const char *json, struct SatarchScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `h` must come from a `satarch_scenario_*` constructor and not be used again.
 */
void satarch_scenario_free(struct SatarchScenario *h);

/**
 * Copies the 64-character hex scenario hash plus NUL into `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` must hold `len` bytes.
 */
enum SatarchStatus satarch_scenario_hash(const struct SatarchScenario *h, char *buf, size_t len);

/**
 * Sizes and costs the design `(t_life_yr, m_p_des_kg)`.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum SatarchStatus satarch_design_vehicle(const struct SatarchScenario *h,
                                          double t_life_yr,
                                          double m_p_des_kg,
                                          struct SatarchBreakdown *out);

/**
 * Monte Carlo NPV mean and sample standard deviation over `n` ≥ 2
 * replicates. Identical arguments give identical results.
 *
 * # Safety
 * `h` must be a live handle; `mean` and `std` must be valid pointers.
 */
enum SatarchStatus satarch_mc_estimate(const struct SatarchScenario *h,
                                       double t_life_yr,
                                       double m_p_des_kg,
                                       size_t n,
                                       uint64_t seed,
                                       uint64_t experiment,
                                       double *mean,
                                       double *std);

/**
 * Loads a saved surrogate model.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SatarchStatus satarch_model_load(const char *path, struct SatarchModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `h` must come from [`satarch_model_load`] and not be used again.
 */
void satarch_model_free(struct SatarchModel *h);

/**
 * Posterior mean and variance at one design point, in target units.
 *
 * # Safety
 * `h` must be a live handle; `mean` must be valid, `var` may be null.
 */
enum SatarchStatus satarch_model_predict(const struct SatarchModel *h,
                                         double t_life_yr,
                                         double m_p_des_kg,
                                         double *mean,
                                         double *var);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SATARCH_H */
