#ifndef DQS_FFI_H
#define DQS_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DqsStatus {
  DqsStatus_Ok = 0,
  DqsStatus_NullPointer = 1,
  DqsStatus_InvalidUtf8 = 2,
  DqsStatus_InvalidScenario = 3,
  DqsStatus_InvalidArgument = 4,
  DqsStatus_IncompatibleAttack = 5,
  DqsStatus_InsufficientRounds = 6,
  DqsStatus_Io = 7,
  DqsStatus_Panic = 8,
} DqsStatus;

typedef enum DqsAttackMode {
  DqsAttackMode_OneWayGc = 0,
  DqsAttackMode_OneWayIndividual = 1,
  DqsAttackMode_TwoWayGc = 2,
} DqsAttackMode;

typedef enum DqsVariant {
  DqsVariant_Entanglement = 0,
  DqsVariant_Mub = 1,
} DqsVariant;

/**
 * Result of one protocol run.
 */
typedef struct DqsRun DqsRun;

/**
 * Parsed scenario file.
 */
typedef struct DqsScenario DqsScenario;

/**
 * Evaluated faithfulness bounds at one phase.
 */
typedef struct DqsBounds {
  double epsilon0;
  /**
   * Negative when the de Finetti term does not apply.
   */
  double f_value;
  /**
   * `INFINITY` where `sin 2nφ` vanishes.
   */
  double bias_bound;
  double variance_bound;
} DqsBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next failing call on the same thread.
 */
const char *dqs_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *dqs_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library that has not been
 * freed yet.
 */
void dqs_string_free(char *s);

/**
 * Parses a TOML scenario.
 *
 * # Safety
 * `toml` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum DqsStatus dqs_scenario_from_toml(const char *toml, struct DqsScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from [`dqs_scenario_from_toml`] not
 * yet freed.
 */
void dqs_scenario_free(struct DqsScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle.
 */
enum DqsStatus dqs_scenario_set_seed(struct DqsScenario *scenario, uint64_t seed);

/**
 * Executes the scenario's protocol once.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum DqsStatus dqs_run(const struct DqsScenario *scenario, struct DqsRun **out);

/**
 * # Safety
 * `run` must be null or a handle from [`dqs_run`] not yet freed.
 */
void dqs_run_free(struct DqsRun *run);

/**
 * Check fidelity, phase estimate and its standard error; `passed` is 1 when
 * the check accepted the run. Any output pointer may be null.
 *
 * # Safety
 * `run` must be a live handle; non-null outputs must be valid.
 */
enum DqsStatus dqs_run_results(const struct DqsRun *run,
                               double *fidelity,
                               double *phi_hat,
                               double *standard_error,
                               int32_t *passed);

/**
 * Full run summary as JSON; free with [`dqs_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum DqsStatus dqs_run_summary_json(const struct DqsRun *run, char **out);

/**
 * Runs the scenario's sweep and returns the CSV report; free with
 * [`dqs_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum DqsStatus dqs_sweep_csv(const struct DqsScenario *scenario, char **out);

/**
 * Faithfulness bounds for one parameter point.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DqsStatus dqs_bounds(enum DqsAttackMode mode,
                          enum DqsVariant variant,
                          double threshold,
                          uintptr_t n,
                          double phi,
                          uint64_t rounds,
                          uint64_t discarded,
                          uint64_t estimation_rounds,
                          struct DqsBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQS_FFI_H */
