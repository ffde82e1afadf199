#ifndef KAHLER_QM_H
#define KAHLER_QM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define KQM_PICTURE_HILBERT 0

#define KQM_PICTURE_HOMOGENEOUS 1

#define KQM_PICTURE_AFFINE 2

#define KQM_COORDINATE_X 0

#define KQM_COORDINATE_P 1

#define KQM_COORDINATE_ALPHA 2

#define KQM_COORDINATE_ALPHA_BAR 3

#define KQM_COORDINATE_NUMBER 4

#define KQM_BRACKET_POISSON 0

#define KQM_BRACKET_RIEMANN 1

#define KQM_BRACKET_JORDAN 2

#define KQM_INTEGRATOR_RK4 0

#define KQM_INTEGRATOR_SPLIT_EXACT 1

/**
 * Outcome of a call.
 */
enum KqmStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  KQM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  KQM_STATUS_NULL_POINTER = 1,
  KQM_STATUS_INVALID_SPACE = 2,
  KQM_STATUS_SPACE_MISMATCH = 3,
  KQM_STATUS_DIMENSION_MISMATCH = 4,
  KQM_STATUS_UNDEFINED_STATE = 5,
  /**
   * The affine chart is undefined at the state.
   */
  KQM_STATUS_CHART = 6,
  KQM_STATUS_NOT_HERMITIAN = 7,
  KQM_STATUS_TRUNCATION = 8,
  KQM_STATUS_INVALID_PARAMETER = 9,
  /**
   * Overlapping reconstructions disagree.
   */
  KQM_STATUS_INCONSISTENT = 10,
  /**
   * The recursive reconstruction seed vanishes.
   */
  KQM_STATUS_SINGULAR_SEED = 11,
  KQM_STATUS_IO = 12,
  /**
   * A string argument is not valid UTF-8.
   */
  KQM_STATUS_INVALID_UTF8 = 13,
  /**
   * A Rust panic was caught at the boundary.
   */
  KQM_STATUS_PANIC = 14,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum KqmStatus KqmStatus;
#else
typedef int32_t KqmStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * A linear operator on a [`KqmSpace`].
 */
typedef struct KqmOperator KqmOperator;

/**
 * A truncated Fock space together with its coordinate operators.
 */
typedef struct KqmSpace KqmSpace;

/**
 * A state vector on a [`KqmSpace`].
 */
typedef struct KqmState KqmState;

/**
 * A complex number laid out as two doubles, real part first.
 */
typedef struct KqmComplex {
  double re;
  double im;
} KqmComplex;

/**
 * Parameters of [`kqm_verify`].
 */
typedef struct KqmSuiteConfig {
  size_t modes;
  size_t cutoff;
  double hbar;
  uint64_t seed;
  size_t cases;
  double tolerance;
} KqmSuiteConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread, excluding
 * the terminating NUL, or 0 when the last call succeeded.
 */
size_t kqm_last_error_length(void);

/**
 * Copies the last error message on this thread into `buffer` as a
 * NUL-terminated string, truncated to `capacity - 1` bytes. Returns the
 * full message length excluding the NUL.
 *
 * # Safety
 * `buffer` must be null or point to at least `capacity` writable bytes.
 */
size_t kqm_last_error_message(char *buffer, size_t capacity);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kqm_version(void);

/**
 * Creates a space of `modes` modes with per-mode cutoff `cutoff`.
 *
 * # Safety
 * `out` must be null or valid for one pointer write.
 */
KqmStatus kqm_space_new(size_t modes, size_t cutoff, double hbar, struct KqmSpace **out);

/**
 * Releases a space. Null is ignored.
 *
 * # Safety
 * `space` must be null or a handle from [`kqm_space_new`] not yet freed.
 */
void kqm_space_free(struct KqmSpace *space);

/**
 * Writes the Hilbert-space dimension of `space` to `out`.
 *
 * # Safety
 * `space` must be a live handle; `out` must be null or writable.
 */
KqmStatus kqm_space_dim(const struct KqmSpace *space, size_t *out);

/**
 * Creates a state from `len` amplitudes in flat basis order.
 *
 * # Safety
 * `space` must be a live handle, `amplitudes` must point to `len`
 * readable values and `out` must be null or writable.
 */
KqmStatus kqm_state_new(const struct KqmSpace *space,
                        const struct KqmComplex *amplitudes,
                        size_t len,
                        struct KqmState **out);

/**
 * Creates the basis state with the given occupation numbers, one per mode.
 *
 * # Safety
 * `space` must be a live handle, `occupations` must point to `len`
 * readable values and `out` must be null or writable.
 */
KqmStatus kqm_state_basis(const struct KqmSpace *space,
                          const size_t *occupations,
                          size_t len,
                          struct KqmState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must be null or a state handle not yet freed.
 */
void kqm_state_free(struct KqmState *state);

/**
 * Copies the amplitudes of `state` into `buffer`, whose length must equal
 * the space dimension.
 *
 * # Safety
 * `state` must be a live handle and `buffer` must point to `len` writable
 * values.
 */
KqmStatus kqm_state_amplitudes(const struct KqmState *state, struct KqmComplex *buffer, size_t len);

/**
 * Writes `|z|^2` of `state` to `out`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be null or writable.
 */
KqmStatus kqm_state_norm_sqr(const struct KqmState *state, double *out);

/**
 * Creates one of the coordinate operators (`KQM_COORDINATE_*`) of `mode`.
 *
 * # Safety
 * `space` must be a live handle; `out` must be null or writable.
 */
KqmStatus kqm_operator_coordinate(const struct KqmSpace *space,
                                  uint32_t coordinate,
                                  size_t mode,
                                  struct KqmOperator **out);

/**
 * Creates an operator from `len = dim * dim` entries in row-major order.
 *
 * # Safety
 * `space` must be a live handle, `entries` must point to `len` readable
 * values and `out` must be null or writable.
 */
KqmStatus kqm_operator_from_matrix(const struct KqmSpace *space,
                                   const struct KqmComplex *entries,
                                   size_t len,
                                   struct KqmOperator **out);

/**
 * Releases an operator. Null is ignored.
 *
 * # Safety
 * `op` must be null or an operator handle not yet freed.
 */
void kqm_operator_free(struct KqmOperator *op);

/**
 * Writes the Kählerian function of `op` at `state` in the given picture
 * (`KQM_PICTURE_*`) to `out`.
 *
 * # Safety
 * `op` and `state` must be live handles; `out` must be null or writable.
 */
KqmStatus kqm_evaluate(const struct KqmOperator *op,
                       const struct KqmState *state,
                       uint32_t picture_code,
                       struct KqmComplex *out);

/**
 * Writes the Kähler product of the functions of `beta` and `gamma` at
 * `state` to `out`.
 *
 * # Safety
 * All handles must be live; `out` must be null or writable.
 */
KqmStatus kqm_kahler_product(const struct KqmOperator *beta,
                             const struct KqmOperator *gamma,
                             const struct KqmState *state,
                             uint32_t picture_code,
                             struct KqmComplex *out);

/**
 * Evaluates a bracket (`KQM_BRACKET_*`) from gradients and tensors
 * (`out_geometric`) and from the operator algebra (`out_algebraic`).
 *
 * # Safety
 * All handles must be live; the out-pointers must be null or writable.
 */
KqmStatus kqm_bracket(const struct KqmOperator *beta,
                      const struct KqmOperator *gamma,
                      const struct KqmState *state,
                      uint32_t bracket_code,
                      uint32_t picture_code,
                      struct KqmComplex *out_geometric,
                      struct KqmComplex *out_algebraic);

/**
 * Integrates the flow of the Hermitian generator `h` from `state` up to
 * `t_end` and returns the final state.
 *
 * # Safety
 * `h` and `state` must be live handles; `out` must be null or writable.
 */
KqmStatus kqm_flow(const struct KqmOperator *h,
                   const struct KqmState *state,
                   double t_end,
                   double step,
                   uint32_t integrator,
                   struct KqmState **out);

/**
 * Writes the Hilbert-picture covector data of `alpha_bar_mode` at `state`
 * into `buffer` (length = space dimension).
 *
 * # Safety
 * `state` must be a live handle and `buffer` must point to `len` writable
 * values.
 */
KqmStatus kqm_forward_direct(const struct KqmState *state,
                             size_t mode,
                             struct KqmComplex *buffer,
                             size_t len);

/**
 * Rebuilds a state from the Hilbert-picture covector data of one mode.
 *
 * # Safety
 * `space` must be a live handle, `data` must point to `len` readable
 * values and `out` must be null or writable.
 */
KqmStatus kqm_reconstruct_direct(const struct KqmSpace *space,
                                 size_t mode,
                                 const struct KqmComplex *data,
                                 size_t len,
                                 struct KqmState **out);

/**
 * Writes the homogeneous-picture covector data of `alpha_bar_mode` at
 * `state` into `buffer` and the seed value `f_alpha_bar` into `out_f`.
 *
 * # Safety
 * `state` must be a live handle, `buffer` must point to `len` writable
 * values and `out_f` must be null or writable.
 */
KqmStatus kqm_forward_recursive(const struct KqmState *state,
                                size_t mode,
                                struct KqmComplex *buffer,
                                size_t len,
                                struct KqmComplex *out_f);

/**
 * Rebuilds a state from homogeneous-picture covector data and the seed
 * value `f`. Fails with [`KqmStatus::SingularSeed`] when `|f| < 1e-12`.
 *
 * # Safety
 * `space` must be a live handle, `data` must point to `len` readable
 * values and `out` must be null or writable.
 */
KqmStatus kqm_reconstruct_recursive(const struct KqmSpace *space,
                                    size_t mode,
                                    const struct KqmComplex *data,
                                    size_t len,
                                    struct KqmComplex f,
                                    struct KqmState **out);

/**
 * Default verification parameters.
 */
struct KqmSuiteConfig kqm_suite_config_default(void);

/**
 * Runs a verification suite (`"all"`, a group name or
 * `"negative-controls"`; null means `"all"`) and returns the JSON report
 * in `out_json`, to be released with [`kqm_string_free`]. A null `config`
 * uses the defaults. `out_all_passed` receives whether every entry met
 * its expectation.
 *
 * # Safety
 * `suite` must be null or a NUL-terminated string, `config` null or
 * readable, and the out-pointers null or writable.
 */
KqmStatus kqm_verify(const char *suite,
                     const struct KqmSuiteConfig *config,
                     char **out_json,
                     bool *out_all_passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from [`kqm_verify`] not yet freed.
 */
void kqm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAHLER_QM_H */
