#ifndef LOGICWB_H
#define LOGICWB_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Equivalence notions accepted by `lwb_equiv`.
 */
typedef enum LwbEquivKind {
  LWB_EQUIV_KIND_BISIM = 0,
  LWB_EQUIV_KIND_BISIM_DEPTH = 1,
  LWB_EQUIV_KIND_COUNTING = 2,
  LWB_EQUIV_KIND_PEBBLE = 3,
  LWB_EQUIV_KIND_PARTIAL_ISO = 4,
  LWB_EQUIV_KIND_GUARDED_BINARY = 5,
} LwbEquivKind;

/**
 * Modal languages accepted by `lwb_sat`.
 */
typedef enum LwbLogic {
  LWB_LOGIC_ML = 0,
  LWB_LOGIC_ML_BULLET = 1,
} LwbLogic;

/**
 * Semantics for bullet formulas.
 */
typedef enum LwbMode {
  LWB_MODE_INTENDED = 0,
  LWB_MODE_QUASI = 1,
} LwbMode;

/**
 * Result codes shared by every function.
 */
typedef enum LwbStatus {
  LWB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LWB_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  LWB_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed structure document or formula text.
   */
  LWB_STATUS_PARSE = 3,
  /**
   * The input is well-formed but violates a precondition of the operation.
   */
  LWB_STATUS_PRECONDITION = 4,
  /**
   * A search exceeded its size budget.
   */
  LWB_STATUS_BUDGET = 5,
  /**
   * An internal self-check failed, or the library panicked.
   */
  LWB_STATUS_INTERNAL = 6,
} LwbStatus;

/**
 * Opaque handle to a finite structure.
 */
typedef struct LwbStructure LwbStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failed call on this thread, or null when none
 * has failed. The pointer stays valid until the next failing call on the
 * same thread.
 */
const char *lwb_last_error_message(void);

/**
 * Clears the last error of this thread.
 */
void lwb_clear_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lwb_string_free(char *s);

/**
 * Parses a structure document. Points in the document are ignored.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum LwbStatus lwb_structure_from_json(const char *json, struct LwbStructure **out_handle);

/**
 * Releases a structure handle. Null is ignored.
 *
 * # Safety
 * `s` must come from `lwb_structure_from_json` and not have been freed.
 */
void lwb_structure_free(struct LwbStructure *s);

/**
 * Serializes a structure in the canonical document layout.
 *
 * # Safety
 * `s` must be a live handle; `out_json` must be writable.
 */
enum LwbStatus lwb_structure_to_json(const struct LwbStructure *s, char **out_json);

/**
 * Number of nodes in the domain.
 *
 * # Safety
 * `s` must be a live handle; `out_len` must be writable.
 */
enum LwbStatus lwb_structure_len(const struct LwbStructure *s, size_t *out_len);

/**
 * Evaluates a modal formula (any operator) at the node `point`.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum LwbStatus lwb_eval_modal(const struct LwbStructure *s,
                              const char *point,
                              const char *formula,
                              enum LwbMode mode,
                              bool *out_value);

/**
 * Evaluates a relation-algebra term; the relation is written as a JSON
 * array of id pairs.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum LwbStatus lwb_eval_ra(const struct LwbStructure *s, const char *term, char **out_json);

/**
 * Evaluates a first-order formula with `x, y, z` bound to the first
 * `n_points` ids of `points`.
 *
 * # Safety
 * `points` must hold `n_points` nul-terminated strings; other pointers
 * must be valid.
 */
enum LwbStatus lwb_eval_fo(const struct LwbStructure *s,
                           const char *const *points,
                           size_t n_points,
                           const char *formula,
                           bool *out_value);

/**
 * Decides whether two structures are equivalent under `kind`. The points
 * are ignored by `Pebble` and `PartialIso`; `k` is used by `BisimDepth`
 * and `Pebble` only.
 *
 * # Safety
 * Pointers must be valid; point strings nul-terminated where used.
 */
enum LwbStatus lwb_equiv(enum LwbEquivKind kind,
                         const struct LwbStructure *left,
                         const char *left_point,
                         const struct LwbStructure *right,
                         const char *right_point,
                         size_t k,
                         bool *out_equivalent);

/**
 * Decides satisfiability. When `out_witness` is non-null and the formula is
 * satisfiable, a pointed witness document is stored there (or null when
 * the procedure gives none).
 *
 * # Safety
 * `formula` must be nul-terminated; `out_sat` must be writable.
 */
enum LwbStatus lwb_sat(enum LwbLogic logic, const char *formula, bool *out_sat, char **out_witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGICWB_H */
