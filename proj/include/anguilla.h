#ifndef ANGUILLA_H
#define ANGUILLA_H

/* C interface to the anguilla swimming-robot simulator.
 *
 * Every function returns an ang_status; on failure ang_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Handles are opaque and owned by the caller; release them with the
 * matching *_free function. Strings returned through char** are
 * NUL-terminated and released with ang_string_free. Angles are radians. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ANG_API __declspec(dllexport)
#else
#define ANG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ang_status {
  ANG_OK = 0,
  ANG_E_INVALID_ARGUMENT = 1,
  ANG_E_VALIDATION = 2,
  ANG_E_JOINT_LIMIT = 3,
  ANG_E_INFEASIBLE_CABLE = 4,
  ANG_E_DIVERGED = 5,
  ANG_E_IO = 6,
  ANG_E_PARSE = 7,
  ANG_E_PROTOCOL = 8,
  ANG_E_INTERNAL = 100
} ang_status;

typedef enum ang_outcome_kind {
  ANG_OUTCOME_NONE = -1,
  ANG_OUTCOME_SUCCESS = 0,
  ANG_OUTCOME_STUCK = 1,
  ANG_OUTCOME_OVERLOAD = 2,
  ANG_OUTCOME_TIMEOUT = 3
} ang_outcome_kind;

typedef struct ang_scenario ang_scenario;
typedef struct ang_sim ang_sim;
typedef struct ang_service ang_service;

ANG_API const char* ang_version(void);
ANG_API const char* ang_last_error(void);
ANG_API const char* ang_status_name(ang_status status);
ANG_API const char* ang_outcome_name(ang_outcome_kind kind);
ANG_API void ang_string_free(char* s);

/* Scenarios. Loading checks syntax and field types only; call
 * ang_scenario_validate for the physical invariants. */
ANG_API ang_status ang_scenario_load(const char* path, ang_scenario** out);
ANG_API ang_status ang_scenario_parse(const char* json, const char* base_dir,
                                      ang_scenario** out);
ANG_API ang_scenario* ang_scenario_clone(const ang_scenario* scenario);
ANG_API void ang_scenario_free(ang_scenario* scenario);
/* On ANG_E_VALIDATION, *report (if non-null) receives a JSON array of
 * {"field", "message"} objects. */
ANG_API ang_status ang_scenario_validate(const ang_scenario* scenario, char** report);
ANG_API ang_status ang_scenario_to_json(const ang_scenario* scenario, char** out);
/* 64 hex digits plus NUL. */
ANG_API ang_status ang_scenario_hash(const ang_scenario* scenario, char out[65]);
ANG_API ang_status ang_scenario_set_dt(ang_scenario* scenario, double dt);
ANG_API ang_status ang_scenario_set_duration(ang_scenario* scenario, double duration);
ANG_API ang_status ang_scenario_step_count(const ang_scenario* scenario, int64_t* out);

/* Batch runs. */
typedef struct ang_run_result {
  ang_outcome_kind outcome;
  double outcome_time;
  uint64_t steps;
  double final_x;
  double final_y;
  double final_heading;
  double final_depth;
  char config_hash[65];
} ang_run_result;

/* log_path and csv_path may be null. decimation >= 1 keeps every n-th
 * record in the log. A diverged run returns ANG_E_DIVERGED with *result
 * describing the last valid state. */
ANG_API ang_status ang_run(const ang_scenario* scenario, const char* log_path,
                           const char* csv_path, int decimation, ang_run_result* result);

/* Stepping. Commands use the wire protocol JSON (see ang_sim_command). */
ANG_API ang_status ang_sim_create(const ang_scenario* scenario, ang_sim** out);
ANG_API void ang_sim_free(ang_sim* sim);
/* Applies one command message, e.g. {"type":"SetCompliance","G":1}. When
 * reply is non-null it receives the ack or error line. */
ANG_API ang_status ang_sim_command(ang_sim* sim, const char* command_json, char** reply);
/* Advances one step. *produced is 0 when paused or finished. The
 * telemetry record is returned through *record when non-null. */
ANG_API ang_status ang_sim_step(ang_sim* sim, int* produced, char** record);
ANG_API ang_status ang_sim_finished(const ang_sim* sim, int* finished);
ANG_API ang_status ang_sim_outcome(const ang_sim* sim, ang_outcome_kind* kind, double* time);
ANG_API ang_status ang_sim_state_json(const ang_sim* sim, char** out);

/* Live service. */
typedef struct ang_service_options {
  int decimation;
  double realtime_factor;
  int start_paused;
  const char* static_dir;
} ang_service_options;

ANG_API void ang_service_options_default(ang_service_options* options);
ANG_API ang_status ang_service_create(const ang_scenario* scenario,
                                      const ang_service_options* options,
                                      ang_service** out);
ANG_API void ang_service_free(ang_service* service);
/* port 0 binds a free port, reported through *bound_port. */
ANG_API ang_status ang_service_start(ang_service* service, const char* host, int port,
                                     int* bound_port);
ANG_API ang_status ang_service_wait(ang_service* service);
ANG_API ang_status ang_service_stop(ang_service* service);

/* Drag calibration: tunes Ct (Cn held) so the scenario's geometry and gait
 * swim target body lengths per cycle in open water with G = 0. scenario
 * may be null for the default robot and gait. */
typedef struct ang_calibration {
  double drag_tangent_Ct;
  double drag_normal_Cn;
  double achieved_bl_per_cycle;
  int evaluations;
} ang_calibration;

ANG_API ang_status ang_calibrate_drag(const ang_scenario* scenario, double target_bl_per_cycle,
                                      double cycles, ang_calibration* out);

#ifdef __cplusplus
}
#endif

#endif
