#ifndef LAMLAB_H
#define LAMLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LamlabStatus {
  LAMLAB_STATUS_OK = 0,
  LAMLAB_STATUS_NULL_POINTER = 1,
  LAMLAB_STATUS_INVALID_UTF8 = 2,
  LAMLAB_STATUS_PARSE = 3,
  LAMLAB_STATUS_DOMAIN = 4,
  LAMLAB_STATUS_RESOURCE_CAP = 5,
  LAMLAB_STATUS_CONSISTENCY = 6,
  LAMLAB_STATUS_PANIC = 7,
} LamlabStatus;

/**
 * A lamination `L_p`.
 */
typedef struct LamlabLamination LamlabLamination;

/**
 * A pair of laminations to be mated.
 */
typedef struct LamlabMating LamlabMating;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *lamlab_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lamlab_string_free(char *s);

/**
 * Sets the largest period any enumeration may reach; returns the value in
 * effect after clamping.
 */
uint32_t lamlab_set_max_period(uint32_t n);

/**
 * Sets the largest pullback depth; returns the value in effect.
 */
uint32_t lamlab_set_max_depth(uint32_t n);

/**
 * Other endpoint of the minor leaf through a periodic angle.
 *
 * # Safety
 * `x` must be a NUL-terminated string; `out` must be writable.
 */
enum LamlabStatus lamlab_companion(const char *x, char **out);

/**
 * Whether `L_p` and the conjugate of `L_q` can be mated.
 *
 * # Safety
 * `p` and `q` must be NUL-terminated strings; `out` must be writable.
 */
enum LamlabStatus lamlab_is_mateable(const char *p, const char *q, bool *out);

/**
 * Number of hyperbolic components of period dividing `m`, as a decimal string.
 *
 * # Safety
 * `out` must be writable.
 */
enum LamlabStatus lamlab_mandelbrot_count(uint32_t m, char **out);

/**
 * Creates the lamination of a periodic angle.
 *
 * # Safety
 * `p` must be a NUL-terminated string; `out` must be writable.
 */
enum LamlabStatus lamlab_lamination_new(const char *p, struct LamlabLamination **out);

/**
 * Releases a lamination. Null is ignored.
 *
 * # Safety
 * `h` must come from [`lamlab_lamination_new`] and not have been freed.
 */
void lamlab_lamination_free(struct LamlabLamination *h);

/**
 * Period of the minor leaf.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum LamlabStatus lamlab_lamination_period(const struct LamlabLamination *h, uint32_t *out);

/**
 * Whether the chord `{a, b}` is a leaf.
 *
 * # Safety
 * `h` must be a live handle; `a` and `b` NUL-terminated strings; `out` writable.
 */
enum LamlabStatus lamlab_lamination_leaf_in(const struct LamlabLamination *h,
                                            const char *a,
                                            const char *b,
                                            bool *out);

/**
 * Finite approximation to `depth` pullbacks, as a JSON report.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum LamlabStatus lamlab_lamination_build_json(const struct LamlabLamination *h,
                                               uint32_t depth,
                                               char **out);

/**
 * Creates a mating of `L_p` with the conjugate of `L_q`.
 *
 * # Safety
 * `p` and `q` must be NUL-terminated strings; `out` must be writable.
 */
enum LamlabStatus lamlab_mating_new(const char *p, const char *q, struct LamlabMating **out);

/**
 * Releases a mating. Null is ignored.
 *
 * # Safety
 * `h` must come from [`lamlab_mating_new`] and not have been freed.
 */
void lamlab_mating_free(struct LamlabMating *h);

/**
 * Full mating report for classes up to `period_bound`, as JSON.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum LamlabStatus lamlab_mating_report_json(const struct LamlabMating *h,
                                            uint32_t period_bound,
                                            char **out);

/**
 * Whether every class up to `period_bound` passes the disjoint-closure checks.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum LamlabStatus lamlab_mating_ok(const struct LamlabMating *h, uint32_t period_bound, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMLAB_H */
