#ifndef CONCURRENCE_LAB_H
#define CONCURRENCE_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_INVALID_SPEC = 2,
  CL_STATUS_DIMENSION_MISMATCH = 3,
  CL_STATUS_INVALID_ARGUMENT = 4,
  CL_STATUS_JSON = 5,
  CL_STATUS_INAPPLICABLE = 6,
  CL_STATUS_PANIC = 7,
} ClStatus;

// Output table for [`cl_spec_to_json`].
typedef enum ClSpecForm {
  CL_SPEC_FORM_ALPHA = 0,
  CL_SPEC_FORM_P = 1,
  CL_SPEC_FORM_BOTH = 2,
} ClSpecForm;

// Evaluation route for [`cl_gap`].
typedef enum ClGapMethod {
  CL_GAP_METHOD_DIRECT = 0,
  CL_GAP_METHOD_EXPANDED = 1,
} ClGapMethod;

// Opaque concurrence spec.
typedef struct ClSpec ClSpec;

// Opaque pure state.
typedef struct ClState ClState;

// Outcome of [`cl_search`].
typedef struct ClSearchResult {
  double min_gap;
  // Nonzero when `min_gap` is below the tolerance.
  int32_t violated;
  // 0-based.
  size_t flag_party;
  double theta;
  size_t evaluations;
} ClSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *cl_last_error(void);

// Parses a spec from JSON (`{"N": .., "alpha": {..}}` and/or `"p"`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum ClStatus cl_spec_from_json(const char *json, struct ClSpec **out);

// Builds a spec from `2^n` values of `α`, indexed by subset bitmask: bit
// `k − 1` is set when party `k` is in the subset.
//
// # Safety
// `alpha` must point to `len` doubles and `out` must be writable.
enum ClStatus cl_spec_from_alpha(size_t n, const double *alpha, size_t len, struct ClSpec **out);

// The symmetric concurrence on `n` parties.
//
// # Safety
// `out` must be writable.
enum ClStatus cl_spec_symmetric(size_t n, struct ClSpec **out);

// Number of parties, or 0 for a null handle.
//
// # Safety
// `spec` must be null or a live handle.
size_t cl_spec_parties(const struct ClSpec *spec);

// Writes 1 to `out` if every nontrivial `α` is non-positive, else 0.
//
// # Safety
// `spec` must be a live handle and `out` writable.
enum ClStatus cl_spec_sufficient(const struct ClSpec *spec, int32_t *out);

// Serializes a spec; free the string with [`cl_string_free`].
//
// # Safety
// `spec` must be a live handle and `out` writable.
enum ClStatus cl_spec_to_json(const struct ClSpec *spec, enum ClSpecForm form, char **out);

// # Safety
// `spec` must be null or a handle not yet freed.
void cl_spec_free(struct ClSpec *spec);

// Builds a state from row-major amplitudes (party 1 slowest).
//
// # Safety
// `dims` must point to `n_parties` values, `re` and `im` to `len` doubles
// each, and `out` must be writable.
enum ClStatus cl_state_new(const size_t *dims,
                           size_t n_parties,
                           const double *re,
                           const double *im,
                           size_t len,
                           struct ClState **out);

// Parses `{"dims": [..], "re": [..], "im": [..]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum ClStatus cl_state_from_json(const char *json, struct ClState **out);

// Total Hilbert-space dimension, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t cl_state_dim(const struct ClState *state);

// # Safety
// `state` must be null or a handle not yet freed.
void cl_state_free(struct ClState *state);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void cl_string_free(char *s);

// Pure-state concurrence.
//
// # Safety
// Handles must be live and `out` writable.
enum ClStatus cl_concurrence(const struct ClSpec *spec, const struct ClState *state, double *out);

// `C(Ξ) − |a|²C(ψ) − |b|²C(φ)` with a qubit flag on `flag_party` (0-based).
//
// # Safety
// Handles must be live and `out` writable.
enum ClStatus cl_gap(const struct ClSpec *spec,
                     const struct ClState *psi,
                     const struct ClState *phi,
                     double a_re,
                     double a_im,
                     double b_re,
                     double b_im,
                     size_t flag_party,
                     enum ClGapMethod method,
                     double *out);

// Random-restart violation search. A negative `flag_party` probes the
// default set of flag parties.
//
// # Safety
// `spec` must be live, `dims` must point to `n_parties` values and `out`
// must be writable.
enum ClStatus cl_search(const struct ClSpec *spec,
                        const size_t *dims,
                        size_t n_parties,
                        size_t restarts,
                        size_t max_iters,
                        uint64_t seed,
                        int64_t flag_party,
                        struct ClSearchResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONCURRENCE_LAB_H */
