#ifndef PLSE_H
#define PLSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlseStatus {
  PLSE_STATUS_OK = 0,
  PLSE_STATUS_NULL_POINTER = 1,
  PLSE_STATUS_INVALID_ARGUMENT = 2,
  PLSE_STATUS_PARSE_ERROR = 3,
  PLSE_STATUS_GENERATION_FAILED = 4,
  PLSE_STATUS_SOLVE_FAILED = 5,
  PLSE_STATUS_INVALID_SOLUTION = 6,
  PLSE_STATUS_BUFFER_TOO_SMALL = 7,
  PLSE_STATUS_PANIC = 8,
} PlseStatus;

/**
 * A validated partial Latin square.
 */
typedef struct PlseInstance PlseInstance;

/**
 * The result of a solver run.
 */
typedef struct PlseSolution PlseSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *plse_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *plse_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void plse_string_free(char *s);

/**
 * Parses an instance in `.pls` text form.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PlseStatus plse_instance_parse(const char *text, struct PlseInstance **out);

/**
 * Generates a random instance. `scheme` is `"qc"` or `"qwh"`; `ratio` is
 * the fraction of filled cells.
 *
 * # Safety
 * `scheme` must be a NUL-terminated string; `out` must be writable.
 */
enum PlseStatus plse_instance_generate(const char *scheme,
                                       uint32_t n,
                                       double ratio,
                                       uint64_t seed,
                                       struct PlseInstance **out);

/**
 * # Safety
 * `inst` must be null or a live handle from this library.
 */
void plse_instance_free(struct PlseInstance *inst);

/**
 * Grid order, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
uint32_t plse_instance_order(const struct PlseInstance *inst);

/**
 * Number of given cells, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t plse_instance_given(const struct PlseInstance *inst);

/**
 * Writes the instance in `.pls` text form to `*out`.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum PlseStatus plse_instance_to_text(const struct PlseInstance *inst, char **out);

/**
 * Runs an algorithm (`"ls1"`, `"ls2"`, `"ls3"`, `"tr-ls"`, `"ils1"`,
 * `"ils2"`, `"ils3"` or `"tr-ils"`) for at most `time_limit_s` seconds.
 *
 * # Safety
 * `inst` must be a live handle, `alg` a NUL-terminated string and `out`
 * writable.
 */
enum PlseStatus plse_solve(const struct PlseInstance *inst,
                           const char *alg,
                           double time_limit_s,
                           uint64_t seed,
                           struct PlseSolution **out);

/**
 * # Safety
 * `sol` must be null or a live handle from this library.
 */
void plse_solution_free(struct PlseSolution *sol);

/**
 * Number of cells the solver filled, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t plse_solution_size(const struct PlseSolution *sol);

/**
 * Size of the greedy starting solution, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t plse_solution_initial_size(const struct PlseSolution *sol);

/**
 * Whether every cell is filled, which proves optimality.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
bool plse_solution_is_optimal(const struct PlseSolution *sol);

/**
 * Copies the filled grid, row-major with 0 for empty cells, into `buf`,
 * which must hold at least n*n entries.
 *
 * # Safety
 * `sol` must be a live handle and `buf` valid for `len` writes.
 */
enum PlseStatus plse_solution_grid(const struct PlseSolution *sol, uint16_t *buf, size_t len);

/**
 * Writes the filled grid in `.pls` text form to `*out`.
 *
 * # Safety
 * `sol` must be a live handle; `out` must be writable.
 */
enum PlseStatus plse_solution_to_text(const struct PlseSolution *sol, char **out);

/**
 * Checks that `solution_text` contains the instance and breaks no Latin
 * square rule. Returns `InvalidSolution` with the first violation as the
 * error message otherwise.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum PlseStatus plse_verify(const char *instance_text, const char *solution_text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLSE_H */
