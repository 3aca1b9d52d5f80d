/* C ABI for the qheat driven-qubit heat simulator. */

#ifndef QHEAT_H
#define QHEAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Sentinel winding value for rows where the coherence phasor vanishes.
 */
#define QH_WINDING_UNDEFINED INT32_MIN

/**
 * Status of a C-ABI call.
 */
typedef enum QhStatus {
  QH_STATUS_OK = 0,
  QH_STATUS_NULL_ARGUMENT = 1,
  QH_STATUS_INVALID_UTF8 = 2,
  QH_STATUS_PARSE_ERROR = 3,
  QH_STATUS_VALIDATION_ERROR = 4,
  QH_STATUS_IO_ERROR = 5,
  QH_STATUS_RUNTIME_ERROR = 6,
  QH_STATUS_BUFFER_TOO_SMALL = 7,
  QH_STATUS_INDEX_OUT_OF_RANGE = 8,
} QhStatus;

/**
 * Opaque parsed experiment configuration.
 */
typedef struct QhConfig QhConfig;

/**
 * Opaque sweep result set.
 */
typedef struct QhSweepResult QhSweepResult;

/**
 * One sweep row. NaN marks missing values.
 */
typedef struct QhRow {
  double f_l_ghz;
  double dt1_ns;
  double p_total_fw;
  double p1_fw;
  double p2_fw;
  double p_dimensionless;
  double rho_ee_p;
  double purity_min;
  /**
   * `QH_WINDING_UNDEFINED` when the winding is undefined.
   */
  int32_t winding;
  bool converged;
  size_t cycles;
} QhRow;

/**
 * One predicted resonance.
 */
typedef struct QhPeakPrediction {
  uint32_t n;
  double f_l_ghz;
  double f_m_ghz;
} QhPeakPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. Owned by the
 * library; do not free. Invalidated by the next failing call.
 */
const char *qh_last_error(void);

/**
 * Library version as a static string.
 */
const char *qh_version(void);

/**
 * Parse a config from UTF-8 text. On success writes a handle (to be freed
 * with [`qh_config_free`]) into `out`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QhStatus qh_config_parse(const char *text, struct QhConfig **out);

/**
 * Load a config from a file path or bundled preset name (`fig1c`, `fig1d`,
 * `fig1e`, `fig3`).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QhStatus qh_config_load(const char *name, struct QhConfig **out);

/**
 * Release a config handle. NULL is a no-op.
 *
 * # Safety
 * `config` must come from this API and not be freed twice.
 */
void qh_config_free(struct QhConfig *config);

/**
 * Run the configured sweep with `workers` threads (0 = all cores). Results
 * are identical for any worker count. The handle must be freed with
 * [`qh_sweep_free`].
 *
 * # Safety
 * `config` must be a live handle from this API; `out` a valid pointer.
 */
enum QhStatus qh_sweep_run(const struct QhConfig *config,
                           size_t workers,
                           struct QhSweepResult **out);

/**
 * Number of rows in a sweep result (0 for NULL).
 *
 * # Safety
 * `result` must be a live handle from this API or NULL.
 */
size_t qh_sweep_len(const struct QhSweepResult *result);

/**
 * Copy row `index` into `row`.
 *
 * # Safety
 * `result` must be a live handle from this API; `row` a valid pointer.
 */
enum QhStatus qh_sweep_row(const struct QhSweepResult *result, size_t index, struct QhRow *row);

/**
 * Write a sweep result as CSV (exact same bytes as the CLI).
 *
 * # Safety
 * `result` must be a live handle; `path` a valid NUL-terminated string.
 */
enum QhStatus qh_sweep_write_csv(const struct QhSweepResult *result, const char *path);

/**
 * Release a sweep result handle. NULL is a no-op.
 *
 * # Safety
 * `result` must come from this API and not be freed twice.
 */
void qh_sweep_free(struct QhSweepResult *result);

/**
 * Fill `out` with up to `capacity` resonance predictions f_{L,n} for
 * n = 1..=n_max of the configured model; `written` receives the count.
 * Fails with `BufferTooSmall` (after writing `capacity` entries) when the
 * buffer cannot hold every prediction.
 *
 * # Safety
 * `config` must be a live handle; `out` must point to at least `capacity`
 * entries; `written` must be a valid pointer.
 */
enum QhStatus qh_predict(const struct QhConfig *config,
                         uint32_t n_max,
                         struct QhPeakPrediction *out,
                         size_t capacity,
                         size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHEAT_H */
