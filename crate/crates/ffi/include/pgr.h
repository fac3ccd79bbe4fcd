/* SPDX-License-Identifier: Apache-2.0 */

#ifndef PGR_H
#define PGR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum PgrStatus {
  PGR_STATUS_OK = 0,
  PGR_STATUS_NULL_POINTER = 1,
  PGR_STATUS_INVALID_UTF8 = 2,
  PGR_STATUS_PARSE = 3,
  PGR_STATUS_NOT_FOUND = 4,
  PGR_STATUS_OUT_OF_RANGE = 5,
  PGR_STATUS_REWRITE = 6,
  PGR_STATUS_STEP_LIMIT = 7,
  PGR_STATUS_INVALID_INPUT = 8,
  PGR_STATUS_PANIC = 9,
} PgrStatus;

/**
 * A graph handle.
 */
typedef struct PgrGraph PgrGraph;

/**
 * An ordered set of rules.
 */
typedef struct PgrRuleSet PgrRuleSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *pgr_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *pgr_version(void);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pgr_string_free(char *s);

/**
 * Parses the text of a single graph.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PgrStatus pgr_graph_parse(const char *text, struct PgrGraph **out);

/**
 * Releases a graph. NULL is ignored.
 *
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void pgr_graph_free(struct PgrGraph *g);

/**
 * Writes the vertex and edge counts of `g`. Either output may be NULL.
 *
 * # Safety
 * `g` must be a live handle; non-NULL outputs must be writable.
 */
enum PgrStatus pgr_graph_size(const struct PgrGraph *g, size_t *vertices, size_t *edges);

/**
 * Serializes `g` under `name` in the text format.
 *
 * # Safety
 * `g` must be a live handle, `name` NUL-terminated, `out` writable.
 */
enum PgrStatus pgr_graph_to_text(const struct PgrGraph *g, const char *name, char **out);

/**
 * Sets `*out` to whether `a` and `b` are isomorphic.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum PgrStatus pgr_graph_isomorphic(const struct PgrGraph *a, const struct PgrGraph *b, bool *out);

/**
 * Parses rules from `text`. With a NULL `system` every rule of the text is
 * taken in file order, otherwise the named system.
 *
 * # Safety
 * `text` must be NUL-terminated, `system` NULL or NUL-terminated, `out`
 * writable.
 */
enum PgrStatus pgr_ruleset_parse(const char *text, const char *system, struct PgrRuleSet **out);

/**
 * Releases a rule set. NULL is ignored.
 *
 * # Safety
 * `rs` must come from this library and not have been freed.
 */
void pgr_ruleset_free(struct PgrRuleSet *rs);

/**
 * Number of rules in `rs`, or 0 for NULL.
 *
 * # Safety
 * `rs` must be NULL or a live handle.
 */
size_t pgr_ruleset_len(const struct PgrRuleSet *rs);

/**
 * Counts the redexes of rule `rule` of `rs` in `g`.
 *
 * # Safety
 * Handles must be live, `rule` NUL-terminated, `out` writable.
 */
enum PgrStatus pgr_count_redexes(const struct PgrGraph *g,
                                 const struct PgrRuleSet *rs,
                                 const char *rule,
                                 size_t *out);

/**
 * Applies redex number `index` of rule `rule` and returns the result as a
 * new graph. `g` is left unchanged.
 *
 * # Safety
 * Handles must be live, `rule` NUL-terminated, `out` writable.
 */
enum PgrStatus pgr_apply(const struct PgrGraph *g,
                         const struct PgrRuleSet *rs,
                         const char *rule,
                         size_t index,
                         struct PgrGraph **out);

/**
 * Rewrites `g` with `rs` until no rule applies, taking the first redex of
 * the first applicable rule each time. `steps` may be NULL.
 *
 * # Safety
 * Handles must be live; `out` writable; `steps` NULL or writable.
 */
enum PgrStatus pgr_normalize(const struct PgrGraph *g,
                             const struct PgrRuleSet *rs,
                             size_t max_steps,
                             struct PgrGraph **out,
                             size_t *steps);

/**
 * Decides a wait-for graph: `*deadlocked` is set to true if it is
 * deadlocked. Fails with `InvalidInput` if `g` is not a wait-for graph.
 *
 * # Safety
 * `g` must be a live handle; `deadlocked` writable.
 */
enum PgrStatus pgr_detect_deadlock(const struct PgrGraph *g, size_t max_steps, bool *deadlocked);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PGR_H */
