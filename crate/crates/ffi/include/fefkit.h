#ifndef FEFKIT_H
#define FEFKIT_H

/* This file is generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call in this interface.
typedef enum FefStatus {
  // The call succeeded.
  FEF_STATUS_OK = 0,
  // A required pointer argument was null.
  FEF_STATUS_NULL_POINTER = 1,
  // The input is not a valid density matrix, or lacks the matrix form a
  // closed-form operation needs.
  FEF_STATUS_INVALID_STATE = 2,
  // A scalar argument is outside its documented range.
  FEF_STATUS_OUT_OF_RANGE = 3,
  // The optimizer stopped before reaching its feasibility tolerance.
  FEF_STATUS_NON_CONVERGENCE = 4,
  // Unexpected internal failure.
  FEF_STATUS_INTERNAL = 5,
} FefStatus;

// Opaque two-qubit state handle.
typedef struct FefState FefState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a state handle from row-major 4×4 real and imaginary parts.
//
// Validation matches the library: Hermitian, unit trace, positive up to a
// small floor. On success `*out` owns the new handle.
//
// # Safety
// `re` and `im` must point to 16 readable doubles each; `out` must be a
// valid writable pointer. The buffers may not alias `out`.
enum FefStatus fefkit_state_new(const double *re, const double *im, struct FefState **out);

// Build the border state: the improvable state with f exactly ½.
//
// # Safety
// `out` must be a valid writable pointer.
enum FefStatus fefkit_border_state(struct FefState **out);

// Release a state handle. Null is ignored.
//
// # Safety
// `state` must be null or a pointer previously returned through an `out`
// parameter of this interface and not yet freed.
void fefkit_state_free(struct FefState *state);

// Copy the state's matrix into row-major real and imaginary buffers.
//
// # Safety
// `state` must be a live handle; `re` and `im` must point to 16 writable
// doubles each.
enum FefStatus fefkit_state_entries(const struct FefState *state, double *re, double *im);

// Fully entangled fraction of the state (closed form).
//
// `attained_on_singlet` is set to 1 when the maximum is reached on the
// singlet, 0 otherwise; pass null to skip it.
//
// # Safety
// `state` must be a live handle; `value` must be writable;
// `attained_on_singlet` must be null or writable.
enum FefStatus fefkit_fef(const struct FefState *state,
                          double *value,
                          int32_t *attained_on_singlet);

// Overlap of the state with the singlet.
//
// # Safety
// `state` must be a live handle; `value` must be writable.
enum FefStatus fefkit_singlet_fraction(const struct FefState *state, double *value);

// Trace norm of the correlation matrix; N ≤ 1 exactly when f ≤ ½.
//
// # Safety
// `state` must be a live handle; `value` must be writable.
enum FefStatus fefkit_n_value(const struct FefState *state, double *value);

// Teleportation fidelity (f·d + 1)/(d + 1) for resource dimension `d`.
//
// # Safety
// `value` must be writable.
enum FefStatus fefkit_teleport_fidelity(double f, uint32_t d, double *value);

// Minimum eigenvalues of both reduction operators, with violation flags
// (1 when the minimum is below the violation threshold).
//
// # Safety
// `state` must be a live handle; all four outputs must be writable.
enum FefStatus fefkit_reduction_check(const struct FefState *state,
                                      double *min_eig_a,
                                      double *min_eig_b,
                                      int32_t *violated_a,
                                      int32_t *violated_b);

// Best one-sided damping improvement of a family-form state.
//
// Writes the acting side (0 = A, 1 = B), the optimal angle, the predicted
// gain, f before and after, and a new handle holding the transformed
// state. Returns `InvalidState` when the state lacks the family zero
// pattern.
//
// # Safety
// `state` must be a live handle; all outputs must be writable.
enum FefStatus fefkit_best_improvement(const struct FefState *state,
                                       int32_t *side,
                                       double *theta,
                                       double *delta,
                                       double *f_before,
                                       double *f_after,
                                       struct FefState **transformed);

// Apply one-sided amplitude damping at angle `theta` to side 0 (A) or
// 1 (B); `toward_one` nonzero damps toward |1⟩ instead of |0⟩. On success
// `*out` owns the transformed state.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum FefStatus fefkit_apply_damping(const struct FefState *state,
                                    double theta,
                                    int32_t side,
                                    int32_t toward_one,
                                    struct FefState **out);

// Exact average fidelity of teleporting through the state with the
// standard scheme.
//
// # Safety
// `state` must be a live handle; `value` must be writable.
enum FefStatus fefkit_sts_exact_fidelity(const struct FefState *state, double *value);

// Certified lower bound on f after the best channel on one side
// (projected gradient ascent with the default configuration and the given
// seed).
//
// `converged` is set to 1 when the feasibility gap closed below
// tolerance. On `NonConvergence` the best value found is still written
// when one exists.
//
// # Safety
// `state` must be a live handle; `value` and `converged` must be
// writable.
enum FefStatus fefkit_max_overlap(const struct FefState *state,
                                  int32_t side,
                                  uint64_t seed,
                                  double *value,
                                  int32_t *converged);

// Copy the last error message of the current thread into `buffer`.
//
// Returns the full message length including the trailing NUL, or 0 when
// no error is stored. The copy is truncated (still NUL-terminated) when
// `length` is too small; call with a null buffer to query the required
// length.
//
// # Safety
// `buffer` must be null or point to `length` writable bytes.
size_t fefkit_last_error_message(char *buffer, size_t length);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FEFKIT_H */
