/*
 * Copyright 2026 The inpipe Authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the in-pipe robot simulator.
 *
 * Every function returns an inpipe_status. On failure a human readable
 * message is available from inpipe_last_error() on the calling thread until
 * the next call into the library. Handles are opaque and owned by the
 * caller; free them with the matching *_free function (NULL is accepted).
 */

#ifndef INPIPE_INPIPE_H
#define INPIPE_INPIPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define INPIPE_API __declspec(dllexport)
#else
#define INPIPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum inpipe_status {
  INPIPE_OK = 0,
  INPIPE_ERR_INVALID_ARGUMENT = 1,
  INPIPE_ERR_OUT_OF_RANGE = 2,
  INPIPE_ERR_PARSE = 3,
  INPIPE_ERR_IO = 4,
  INPIPE_ERR_DECODE = 5,
  INPIPE_ERR_STATE = 6,
  INPIPE_ERR_BUFFER_TOO_SMALL = 7,
  INPIPE_ERR_INTERNAL = 8
} inpipe_status;

/* Values match the `sim run` exit codes. */
typedef enum inpipe_result {
  INPIPE_RESULT_COMPLETED = 0,
  INPIPE_RESULT_RUNNING = 1,
  INPIPE_RESULT_SLIPPED_OUT = 2,
  INPIPE_RESULT_OVERHEATED = 3,
  INPIPE_RESULT_TIMEOUT = 4
} inpipe_result;

typedef enum inpipe_mode {
  INPIPE_MODE_IDLE = 0,
  INPIPE_MODE_DRIVE = 1,
  INPIPE_MODE_ROLL = 2,
  INPIPE_MODE_HOLD_ANGLE = 3,
  INPIPE_MODE_ESTOP = 4
} inpipe_mode;

typedef enum inpipe_torque_mode {
  INPIPE_TORQUE_ANCHORS = 0,
  INPIPE_TORQUE_POLY = 1
} inpipe_torque_mode;

typedef struct inpipe_telemetry_row {
  double t_s;
  double s_m;
  double D_m;
  double theta_mid_deg;
  double joint_duty;
  double drive_duty;
  double est_torque_Nm;
  double slip_margin_N;
  int slip_flag;
  double board_temp_C;
  inpipe_mode mode;
} inpipe_telemetry_row;

typedef struct inpipe_can_frame {
  uint16_t id;
  uint8_t dlc;
  uint8_t data[8];
} inpipe_can_frame;

typedef struct inpipe_calibration_options {
  uint64_t seed;
  int noise;              /* nonzero enables stepwise + sensor noise */
  double step_height_Nm;  /* default 0.08 */
  double sensor_noise_Nm; /* half-width, default 0.01 */
  double lever_m;         /* rig wheel separation, default 0.24 */
  inpipe_torque_mode ground_truth;
} inpipe_calibration_options;

typedef struct inpipe_scenario inpipe_scenario;
typedef struct inpipe_run inpipe_run;
typedef struct inpipe_gateway inpipe_gateway;

INPIPE_API const char* inpipe_version(void);
INPIPE_API const char* inpipe_last_error(void);
INPIPE_API const char* inpipe_status_string(inpipe_status status);
INPIPE_API const char* inpipe_result_string(inpipe_result result);

/* Scenarios ------------------------------------------------------------- */

INPIPE_API inpipe_status inpipe_scenario_load(const char* path,
                                              inpipe_scenario** out);
INPIPE_API inpipe_status inpipe_scenario_parse(const char* text,
                                               inpipe_scenario** out);
INPIPE_API void inpipe_scenario_free(inpipe_scenario* sc);
INPIPE_API inpipe_status inpipe_scenario_set_seed(inpipe_scenario* sc,
                                                  uint64_t seed);
INPIPE_API inpipe_status inpipe_scenario_set_max_time(inpipe_scenario* sc,
                                                      double seconds);
/* Replaces every joint_duty step of the mission script. */
INPIPE_API inpipe_status inpipe_scenario_override_joint_duty(
    inpipe_scenario* sc, double duty_pct);
INPIPE_API inpipe_status inpipe_scenario_total_length(const inpipe_scenario* sc,
                                                      double* out_m);

/* Batch runs ------------------------------------------------------------ */

INPIPE_API inpipe_status inpipe_run_create(const inpipe_scenario* sc,
                                           inpipe_run** out);
INPIPE_API void inpipe_run_free(inpipe_run* run);
/* Advances by `steps` fixed steps, stopping early at a terminal verdict. */
INPIPE_API inpipe_status inpipe_run_step(inpipe_run* run, uint64_t steps);
INPIPE_API inpipe_status inpipe_run_to_end(inpipe_run* run,
                                           inpipe_result* result,
                                           double* t_s);
/* action: stop, drive, roll, joint_duty, joint_angle, estop, reset_estop. */
INPIPE_API inpipe_status inpipe_run_submit(inpipe_run* run, const char* action,
                                           double value);
INPIPE_API inpipe_status inpipe_run_status(const inpipe_run* run,
                                           inpipe_result* result, double* t_s);
INPIPE_API inpipe_status inpipe_run_row_count(const inpipe_run* run,
                                              size_t* out);
INPIPE_API inpipe_status inpipe_run_get_row(const inpipe_run* run, size_t index,
                                            inpipe_telemetry_row* out);
/* path "-" writes to stdout. */
INPIPE_API inpipe_status inpipe_run_write_csv(const inpipe_run* run,
                                              const char* path);
INPIPE_API inpipe_status inpipe_run_write_frames(const inpipe_run* run,
                                                 const char* path);

/* Actuation and calibration --------------------------------------------- */

INPIPE_API inpipe_status inpipe_duty_to_torque(inpipe_torque_mode mode,
                                               double duty_pct, double* out_Nm);
/* duty_pct,torque_Nm table at 0.2 % resolution; path "-" is stdout. */
INPIPE_API inpipe_status inpipe_torque_map_write_csv(inpipe_torque_mode mode,
                                                     const char* path);
INPIPE_API void inpipe_calibration_defaults(inpipe_calibration_options* opts);
/* Either path may be NULL. coeffs_out receives a0..a4 (ascending powers). */
INPIPE_API inpipe_status inpipe_calibrate(const inpipe_calibration_options* opts,
                                          const char* samples_path,
                                          const char* fit_path,
                                          double coeffs_out[5],
                                          double* rmse_out);

/* Parameters ------------------------------------------------------------ */

/* Copies the default parameter listing (NUL terminated) into buf. `needed`
 * receives the full size including the terminator. */
INPIPE_API inpipe_status inpipe_params_describe(char* buf, size_t capacity,
                                                size_t* needed);

/* CAN codec ------------------------------------------------------------- */

INPIPE_API inpipe_status inpipe_can_encode_command(uint8_t node, uint8_t opcode,
                                                   int16_t operand,
                                                   inpipe_can_frame* out);
INPIPE_API inpipe_status inpipe_can_decode_command(const inpipe_can_frame* frame,
                                                   uint8_t* node,
                                                   uint8_t* opcode,
                                                   int16_t* operand);

/* Gateway --------------------------------------------------------------- */

/* Binds immediately; port 0 picks a free port. speed is simulated seconds
 * per wall second, 0 for unpaced. */
INPIPE_API inpipe_status inpipe_gateway_create(const inpipe_scenario* sc,
                                               const char* address,
                                               uint16_t port, double speed,
                                               inpipe_gateway** out);
INPIPE_API void inpipe_gateway_free(inpipe_gateway* gw);
INPIPE_API uint16_t inpipe_gateway_port(const inpipe_gateway* gw);
/* Blocks until inpipe_gateway_stop(). */
INPIPE_API inpipe_status inpipe_gateway_run(inpipe_gateway* gw);
/* Async-signal-safe. */
INPIPE_API void inpipe_gateway_stop(inpipe_gateway* gw);

#ifdef __cplusplus
}
#endif

#endif /* INPIPE_INPIPE_H */
