#ifndef BERRY_ESSEEN_H
#define BERRY_ESSEEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum BeStatus {
  BE_STATUS_OK = 0,
  BE_STATUS_NULL_POINTER = 1,
  BE_STATUS_INVALID_UTF8 = 2,
  BE_STATUS_CONFIG = 3,
  BE_STATUS_UNSUPPORTED_MODEL = 4,
  BE_STATUS_INVALID_MODEL = 5,
  BE_STATUS_DOMAIN = 6,
  BE_STATUS_CAPACITY = 7,
  BE_STATUS_DEGENERATE = 8,
  BE_STATUS_NUMERIC = 9,
  BE_STATUS_IO = 10,
  BE_STATUS_PANIC = 11,
} BeStatus;

// Experiment commands.
typedef enum BeCommand {
  BE_COMMAND_BOUND = 0,
  BE_COMMAND_VERIFY = 1,
  BE_COMMAND_EXAMPLE41 = 2,
  BE_COMMAND_SWEEP = 3,
} BeCommand;

// A validated experiment configuration with its command.
typedef struct BeExperiment BeExperiment;

// A built statistic model.
typedef struct BeModel BeModel;

// Encoded output of a finished experiment.
typedef struct BeResult BeResult;

// A bound split into its explicit part and the coefficient of the
// unspecified constant.
typedef struct BeBound {
  double known;
  double c_coeff;
  double std_error;
  // 1 when the bound exists at the requested point, 0 when it is not
  // defined there.
  int defined;
} BeBound;

// One row of the counterexample table.
typedef struct BeCounterexample {
  double epsilon;
  double n;
  double lhs_exact;
  double lhs_floor;
  double shorack_rhs;
  double bg_bracket;
  double ratio_shorack;
  double ratio_bg;
} BeCounterexample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Free with
// [`be_string_free`].
char *be_last_error_message(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be null or a pointer returned by this library, not yet freed.
void be_string_free(char *s);

// Library version as a static string.
const char *be_version(void);

// Build a model from a JSON descriptor such as
// `{"kind": "ustat", "kernel": "variance", "distribution": "std_normal", "n": 50}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum BeStatus be_model_new(const char *json, struct BeModel **out);

// # Safety
// `model` must be null or a handle from [`be_model_new`], not yet freed.
void be_model_free(struct BeModel *model);

// Stable identifier of the model. Free with [`be_string_free`].
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum BeStatus be_model_id(const struct BeModel *model, char **out);

// Evaluate a closed-form bound (`eq1.4` and the `eq3.*` family) at `z`
// with moment order `p`. `out->defined` is 0 where the bound does not
// apply, e.g. `eq3.6` outside its range.
//
// # Safety
// `model` must be a live handle, `tag` a NUL-terminated string and `out`
// writable.
enum BeStatus be_model_bound(const struct BeModel *model,
                             const char *tag,
                             double z,
                             double p,
                             struct BeBound *out);

// Counterexample quantities at one ε in (0, 1/64), with `n = ε^{-4}`.
//
// # Safety
// `out` must be writable.
enum BeStatus be_counterexample(double epsilon, struct BeCounterexample *out);

// Exact Kolmogorov distance between the standardized sum of `n` Rademacher
// variables and the standard normal law.
//
// # Safety
// `out` must be writable.
enum BeStatus be_rademacher_ks(uint64_t n, double *out);

// Validate a JSON experiment configuration for `command`.
//
// # Safety
// `config` must be a NUL-terminated string; `out` must be writable.
enum BeStatus be_experiment_new(const char *config,
                                enum BeCommand command,
                                struct BeExperiment **out);

// Override the worker thread count (0 = all cores).
//
// # Safety
// `exp` must be a live handle.
enum BeStatus be_experiment_set_threads(struct BeExperiment *exp, uint32_t threads);

// Override the master seed.
//
// # Safety
// `exp` must be a live handle.
enum BeStatus be_experiment_set_seed(struct BeExperiment *exp, uint64_t seed);

// Run the experiment. Row-level failures do not fail the call; they are
// reflected in [`be_result_exit_code`].
//
// # Safety
// `exp` must be a live handle; `out` must be writable.
enum BeStatus be_experiment_run(const struct BeExperiment *exp, struct BeResult **out);

// # Safety
// `exp` must be null or a handle from [`be_experiment_new`], not yet freed.
void be_experiment_free(struct BeExperiment *exp);

// Encoded table (CSV or JSON, per the configuration). The bytes stay owned
// by `result` and are valid until it is freed.
//
// # Safety
// `result` must be a live handle; `data` and `len` must be writable.
enum BeStatus be_result_bytes(const struct BeResult *result, const uint8_t **data, size_t *len);

// 0 all checks passed, 1 a check failed, 3 some rows could not be computed.
//
// # Safety
// `result` must be a live handle.
int be_result_exit_code(const struct BeResult *result);

// # Safety
// `result` must be null or a handle from [`be_experiment_run`], not yet freed.
void be_result_free(struct BeResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERRY_ESSEEN_H */
