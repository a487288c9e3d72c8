#ifndef QBOOST_H
#define QBOOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_ARGUMENT = 2,
  QB_STATUS_DOMAIN = 3,
  QB_STATUS_BINDING = 4,
  QB_STATUS_FORMAT = 5,
  QB_STATUS_NUMERICAL = 6,
  QB_STATUS_MISSING_INPUT = 7,
  QB_STATUS_CONFIG = 8,
  QB_STATUS_IO = 9,
  QB_STATUS_PANIC = 10,
} QbStatus;

/**
 * Rotation axis.
 */
typedef enum QbAxis {
  QB_AXIS_X = 0,
  QB_AXIS_Y = 1,
  QB_AXIS_Z = 2,
} QbAxis;

/**
 * What a model consumes.
 */
typedef enum QbInputKind {
  /**
   * 28×28 grayscale bytes.
   */
  QB_INPUT_KIND_IMAGE = 0,
  /**
   * A statevector handle.
   */
  QB_INPUT_KIND_STATE = 1,
} QbInputKind;

typedef struct QbCircuit QbCircuit;

typedef struct QbModel QbModel;

typedef struct QbState QbState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *qb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qb_version(void);

/**
 * `|0…0⟩` on `n_qubits` qubits.
 *
 * # Safety
 * `out` must be a valid pointer to write a handle into.
 */
enum QbStatus qb_state_new(size_t n_qubits, struct QbState **out);

/**
 * State from `len` amplitudes split into real and imaginary arrays. `len`
 * must be a power of two and the vector normalized.
 *
 * # Safety
 * `re` and `im` must point to `len` doubles; `out` must be writable.
 */
enum QbStatus qb_state_from_amplitudes(const double *re,
                                       const double *im,
                                       size_t len,
                                       struct QbState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library, not yet freed.
 */
void qb_state_free(struct QbState *state);

/**
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum QbStatus qb_state_n_qubits(const struct QbState *state, size_t *out);

/**
 * Copy the `2^n` amplitudes into `re`/`im`, each of length `len`.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum QbStatus qb_state_amplitudes(const struct QbState *state, double *re, double *im, size_t len);

/**
 * Marginal outcome probabilities of `qubits` (first listed qubit is the
 * least-significant outcome bit) into `out` of length `2^n_measured`.
 *
 * # Safety
 * `state` must be a live handle; `qubits` must hold `n_measured` entries
 * and `out` `len` doubles.
 */
enum QbStatus qb_state_probabilities(const struct QbState *state,
                                     const size_t *qubits,
                                     size_t n_measured,
                                     double *out,
                                     size_t len);

/**
 * Empty circuit on `n_qubits` qubits.
 *
 * # Safety
 * `out` must be writable.
 */
enum QbStatus qb_circuit_new(size_t n_qubits, struct QbCircuit **out);

/**
 * # Safety
 * `circuit` must be null or a live handle.
 */
void qb_circuit_free(struct QbCircuit *circuit);

/**
 * Append `R_axis(θ)` with a literal angle.
 *
 * # Safety
 * `circuit` must be a live handle.
 */
enum QbStatus qb_circuit_rotation(struct QbCircuit *circuit,
                                  enum QbAxis axis,
                                  size_t qubit,
                                  double angle);

/**
 * Append `R_axis(params[slot])`, bound when the circuit is applied.
 *
 * # Safety
 * `circuit` must be a live handle.
 */
enum QbStatus qb_circuit_param_rotation(struct QbCircuit *circuit,
                                        enum QbAxis axis,
                                        size_t qubit,
                                        size_t slot);

/**
 * # Safety
 * `circuit` must be a live handle.
 */
enum QbStatus qb_circuit_cnot(struct QbCircuit *circuit, size_t control, size_t target);

/**
 * # Safety
 * `circuit` must be a live handle.
 */
enum QbStatus qb_circuit_cz(struct QbCircuit *circuit, size_t a, size_t b);

/**
 * Number of parameter slots the circuit references.
 *
 * # Safety
 * `circuit` must be a live handle and `out` writable.
 */
enum QbStatus qb_circuit_n_slots(const struct QbCircuit *circuit, size_t *out);

/**
 * Evolve `state` in place with slots bound from `params`.
 *
 * # Safety
 * Handles must be live; `params` must hold `n_params` doubles.
 */
enum QbStatus qb_circuit_apply(const struct QbCircuit *circuit,
                               const double *params,
                               size_t n_params,
                               struct QbState *state);

/**
 * Load a checkpoint written by `qboost train` or `qboost boost`.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out` writable.
 */
enum QbStatus qb_model_load(const char *path, struct QbModel **out);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
void qb_model_free(struct QbModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum QbStatus qb_model_n_classes(const struct QbModel *model, size_t *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum QbStatus qb_model_n_members(const struct QbModel *model, size_t *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum QbStatus qb_model_input_kind(const struct QbModel *model, enum QbInputKind *out);

/**
 * Classify a 28×28 image (`PIXELS` = 784 bytes, row-major). `scores` may
 * be null; otherwise it receives `n_classes` ensemble scores.
 *
 * # Safety
 * `model` must be live, `pixels` hold `len` bytes, `label` be writable and
 * `scores` null or hold `scores_len` doubles.
 */
enum QbStatus qb_model_predict_image(const struct QbModel *model,
                                     const uint8_t *pixels,
                                     size_t len,
                                     size_t *label,
                                     double *scores,
                                     size_t scores_len);

/**
 * Classify a quantum state.
 *
 * # Safety
 * As [`qb_model_predict_image`], with `state` a live handle.
 */
enum QbStatus qb_model_predict_state(const struct QbModel *model,
                                     const struct QbState *state,
                                     size_t *label,
                                     double *scores,
                                     size_t scores_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBOOST_H */
