#ifndef AVLIP_H
#define AVLIP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum AvlipStatus {
  AVLIP_STATUS_OK = 0,
  AVLIP_STATUS_NULL_POINTER = 1,
  AVLIP_STATUS_INVALID_UTF8 = 2,
  /**
   * Unparseable spec, rational or segment list.
   */
  AVLIP_STATUS_MALFORMED = 3,
  /**
   * A value outside its allowed range, such as a point outside [0, 1].
   */
  AVLIP_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The input is well formed but the operation does not apply to it.
   */
  AVLIP_STATUS_PRECONDITION = 5,
  /**
   * The output buffer is too small; the required length was written.
   */
  AVLIP_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A panic inside the library.
   */
  AVLIP_STATUS_INTERNAL = 7,
} AvlipStatus;

typedef enum AvlipVerdict {
  AVLIP_VERDICT_FINITE = 0,
  AVLIP_VERDICT_DIVERGENT_BEYOND_CAP = 1,
  AVLIP_VERDICT_UNRESOLVED = 2,
} AvlipVerdict;

/**
 * An expanded function on [0, 1].
 */
typedef struct AvlipFunction AvlipFunction;

/**
 * Bracket `[lower, upper]` on a seminorm; `upper` may be `INFINITY`.
 */
typedef struct AvlipEstimate {
  double lower;
  double upper;
  enum AvlipVerdict verdict;
  /**
   * Refinement depth at which the cap was passed; 0 unless divergent.
   */
  uint32_t depth;
} AvlipEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *avlip_last_error(void);

/**
 * Parses a JSON function spec and expands it into a new handle.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum AvlipStatus avlip_function_from_json(const char *json, struct AvlipFunction **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `f` must come from `avlip_function_from_json` and not be freed twice.
 */
void avlip_function_free(struct AvlipFunction *f);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void avlip_string_free(char *s);

/**
 * Exact value at the rational `x`.
 *
 * # Safety
 * `f` must be a live handle, `x` NUL-terminated and `out` writable.
 */
enum AvlipStatus avlip_eval(const struct AvlipFunction *f, const char *x, char **out);

/**
 * Exact total variation.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum AvlipStatus avlip_variation(const struct AvlipFunction *f, char **out);

/**
 * Exact local slope at `x`, or `"inf"`.
 *
 * # Safety
 * `f` must be a live handle, `x` NUL-terminated and `out` writable.
 */
enum AvlipStatus avlip_local_slope(const struct AvlipFunction *f, const char *x, char **out);

/**
 * Exact maximal function at `x`, or `"inf"`. Step functions must be
 * right-continuous.
 *
 * # Safety
 * `f` must be a live handle, `x` NUL-terminated and `out` writable.
 */
enum AvlipStatus avlip_maximal(const struct AvlipFunction *f, const char *x, char **out);

/**
 * Strong average smoothness.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum AvlipStatus avlip_strong_avg(const struct AvlipFunction *f,
                                  double tol,
                                  double cap,
                                  struct AvlipEstimate *out);

/**
 * Weak average smoothness.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum AvlipStatus avlip_weak_avg(const struct AvlipFunction *f,
                                double tol,
                                struct AvlipEstimate *out);

/**
 * Disjoint subfamily of `[["l","r"], ...]` covering at least half the union.
 * Writes the selected indices, ascending, into `indices[0..capacity]` and
 * their number into `count`. When `capacity` is too small, only `count` is
 * written and `BufferTooSmall` is returned.
 *
 * # Safety
 * `segments_json` must be NUL-terminated, `indices` writable for `capacity`
 * entries (or NULL with zero capacity) and `count` writable.
 */
enum AvlipStatus avlip_select_disjoint(const char *segments_json,
                                       uintptr_t *indices,
                                       uintptr_t capacity,
                                       uintptr_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AVLIP_H */
