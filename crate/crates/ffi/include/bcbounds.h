#ifndef BCBOUNDS_H
#define BCBOUNDS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. The nonzero values shared with the command-line tool carry
// the same meaning there.
typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_VERIFICATION_FAILED = 1,
  BC_STATUS_PARSE_ERROR = 2,
  BC_STATUS_DOMAIN_ERROR = 3,
  BC_STATUS_RESOURCE_LIMIT = 4,
  BC_STATUS_IO_ERROR = 5,
  BC_STATUS_NULL_POINTER = 6,
  BC_STATUS_INVALID_UTF8 = 7,
  BC_STATUS_OUT_OF_RANGE = 8,
  BC_STATUS_PANIC = 9,
} BcStatus;

typedef enum BcBound {
  BC_BOUND_GK = 0,
  BC_BOUND_KAT = 1,
  BC_BOUND_CHUNG_ERDOS = 2,
  BC_BOUND_UNION = 3,
} BcBound;

// An event system parsed from space-file text. Opaque to C.
typedef struct BcSystem BcSystem;

// Summary of a gap search: the number of systems with KAT > GK and the
// largest gap found.
typedef struct BcSearchSummary {
  uint64_t evaluated;
  uint64_t hits;
  uint64_t gk_above_kat;
  uint64_t ties;
  // Largest `KAT - GK`, or 0 when there are no hits.
  double best_gap;
  // Trial index of the largest gap, or 0 when there are no hits.
  uint64_t best_trial;
} BcSearchSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL after a
// success. The pointer stays valid until the next call into this library on
// the same thread.
const char *bc_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void bc_string_free(char *s);

// Parses space-file text into a new system stored in `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum BcStatus bc_system_parse(const char *text, struct BcSystem **out);

// A new handle holding the built-in six-event instance.
struct BcSystem *bc_system_paper(void);

// # Safety
// `sys` must be NULL or a handle from this library, not yet freed.
void bc_system_free(struct BcSystem *sys);

// Number of events, or 0 for NULL.
//
// # Safety
// `sys` must be NULL or a live handle.
size_t bc_system_event_count(const struct BcSystem *sys);

// Number of atoms, or 0 for NULL.
//
// # Safety
// `sys` must be NULL or a live handle.
size_t bc_system_atom_count(const struct BcSystem *sys);

// Computes one bound. `out_exact` (optional) receives `"num/den"`, to be
// freed with [`bc_string_free`]; `out_value` (optional) receives the
// nearest double.
//
// # Safety
// `sys` must be a live handle; the out-pointers must be NULL or valid.
enum BcStatus bc_bound(const struct BcSystem *sys,
                       enum BcBound kind,
                       char **out_exact,
                       double *out_value);

// Exact `P(A_i ∩ A_j)` as `"num/den"` (0-based indices).
//
// # Safety
// `sys` must be a live handle and `out_exact` a valid pointer.
enum BcStatus bc_joint_probability(const struct BcSystem *sys,
                                   size_t i,
                                   size_t j,
                                   char **out_exact);

// Re-derives the built-in instance's joint matrix and bounds. Returns
// [`BcStatus::VerificationFailed`] if any check fails.
//
// # Safety
// `out_passed` and `out_total` must be NULL or valid.
enum BcStatus bc_verify_paper(size_t *out_passed, size_t *out_total);

// Right-hand side of the dyadic moment bound at prefix length `n` and
// exponent `p` in (0, 1).
//
// # Safety
// `out` must be a valid pointer.
enum BcStatus bc_ce1_bound_rhs(size_t n, double p, double *out);

// Seeded search for systems with KAT > GK. Deterministic in its arguments.
//
// # Safety
// `out` must be a valid pointer.
enum BcStatus bc_search(size_t atoms,
                        size_t events,
                        uint64_t granularity,
                        uint64_t trials,
                        uint64_t seed,
                        struct BcSearchSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BCBOUNDS_H */
