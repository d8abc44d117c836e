#ifndef TMOTIVE_H
#define TMOTIVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmStatus {
  TM_STATUS_OK = 0,
  TM_STATUS_NULL_POINTER = 1,
  TM_STATUS_INVALID_PARAMETER = 2,
  TM_STATUS_PARSE = 3,
  TM_STATUS_INSUFFICIENT_PRECISION = 4,
  TM_STATUS_DIVISION_BY_ZERO = 5,
  TM_STATUS_OUTSIDE_DOMAIN = 6,
  TM_STATUS_SHAPE = 7,
  TM_STATUS_NOT_CONVERGENT = 8,
  TM_STATUS_ZERO_AT_PRECISION = 9,
  TM_STATUS_UNSUPPORTED = 10,
  TM_STATUS_INTERNAL = 11,
} TmStatus;

/**
 * Arithmetic context for one `q`, with cached Carlitz data.
 */
typedef struct TmContext TmContext;

/**
 * A truncated Puiseux number bound to the context it was created in.
 */
typedef struct TmNumber TmNumber;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next call.
 */
const char *tm_last_error(void);

/**
 * # Safety
 * `out` must be writable.
 */
enum TmStatus tm_context_new(uint64_t q, struct TmContext **out);

/**
 * # Safety
 * `ctx` must come from [`tm_context_new`] and not be used afterwards.
 */
void tm_context_free(struct TmContext *ctx);

/**
 * Parses a series literal such as `t + w*t^(2/3) + O(t^(10))`.
 *
 * # Safety
 * `s` must be a NUL-terminated string; `out` must be writable.
 */
enum TmStatus tm_number_parse(const struct TmContext *ctx, const char *s, struct TmNumber **out);

/**
 * # Safety
 * `x` must come from this library and not be used afterwards.
 */
void tm_number_free(struct TmNumber *x);

/**
 * # Safety
 * `x` must be a valid number; `out` must be writable.
 */
enum TmStatus tm_number_to_string(const struct TmNumber *x, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tm_string_free(char *s);

/**
 * Valuation `num/den` in lowest terms; `ZeroAtPrecision` when the number
 * has no known nonzero term.
 *
 * # Safety
 * `x` must be a valid number; `num`, `den` must be writable.
 */
enum TmStatus tm_number_valuation(const struct TmNumber *x, int64_t *num, int64_t *den);

/**
 * The periods `π_1` of the Carlitz module and `π_2` of its rank-2 analogue.
 *
 * # Safety
 * `ctx` must be valid; `pi1`, `pi2` must be writable.
 */
enum TmStatus tm_periods(const struct TmContext *ctx, struct TmNumber **pi1, struct TmNumber **pi2);

/**
 * First Siegel entry `s(a)` of the lattice of `M_t(a)`.
 *
 * # Safety
 * `ctx`, `a` must be valid; `out` must be writable.
 */
enum TmStatus tm_siegel_s(const struct TmContext *ctx,
                          const struct TmNumber *a,
                          struct TmNumber **out);

/**
 * Whether `(s11, ω)` has a dual lattice.
 *
 * # Safety
 * `ctx`, `s11` must be valid; `out` must be writable.
 */
enum TmStatus tm_dual_exists(const struct TmContext *ctx, const struct TmNumber *s11, bool *out);

/**
 * Whether the bounded search finds an isomorphism `M(a) → M(a2)` of
 * `τ`-degree at most `kmax`.
 *
 * # Safety
 * `ctx`, `a`, `a2` must be valid; `out` must be writable.
 */
enum TmStatus tm_iso_check(const struct TmContext *ctx,
                           const struct TmNumber *a,
                           const struct TmNumber *a2,
                           size_t kmax,
                           bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TMOTIVE_H */
