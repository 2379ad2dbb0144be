// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "inpipe/inpipe.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "actuation.hpp"
#include "calibration.hpp"
#include "canbus.hpp"
#include "error.hpp"
#include "gateway.hpp"
#include "scenario.hpp"
#include "simulation.hpp"

struct inpipe_scenario {
  inpipe::Scenario value;
};

struct inpipe_run {
  inpipe::Simulation sim;
};

struct inpipe_gateway {
  inpipe::Gateway gw;
};

namespace {

thread_local std::string g_last_error;

inpipe_status set_error(inpipe_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

inpipe_status map_code(inpipe::ErrorCode code) {
  using inpipe::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return INPIPE_ERR_INVALID_ARGUMENT;
    case ErrorCode::OutOfRange: return INPIPE_ERR_OUT_OF_RANGE;
    case ErrorCode::Parse: return INPIPE_ERR_PARSE;
    case ErrorCode::Io: return INPIPE_ERR_IO;
    case ErrorCode::Decode: return INPIPE_ERR_DECODE;
    case ErrorCode::State: return INPIPE_ERR_STATE;
  }
  return INPIPE_ERR_INTERNAL;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
inpipe_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const inpipe::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(INPIPE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(INPIPE_ERR_INTERNAL, e.what());
  }
}

#define INPIPE_REQUIRE(cond)                                              \
  do {                                                                    \
    if (!(cond))                                                          \
      return set_error(INPIPE_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

inpipe_result to_c(inpipe::MissionResult r) {
  using inpipe::MissionResult;
  switch (r) {
    case MissionResult::Completed: return INPIPE_RESULT_COMPLETED;
    case MissionResult::SlippedOut: return INPIPE_RESULT_SLIPPED_OUT;
    case MissionResult::Overheated: return INPIPE_RESULT_OVERHEATED;
    case MissionResult::Timeout: return INPIPE_RESULT_TIMEOUT;
    case MissionResult::Running: return INPIPE_RESULT_RUNNING;
  }
  return INPIPE_RESULT_RUNNING;
}

inpipe::actuation::TorqueMap torque_map(inpipe_torque_mode mode) {
  if (mode == INPIPE_TORQUE_ANCHORS) return inpipe::actuation::TorqueMap::anchors();
  if (mode == INPIPE_TORQUE_POLY) return inpipe::actuation::TorqueMap::polynomial();
  throw inpipe::Error(inpipe::ErrorCode::InvalidArgument, "unknown torque mode");
}

void write_text(const char* path, const std::string& text) {
  if (std::strcmp(path, "-") == 0) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw inpipe::Error(inpipe::ErrorCode::Io,
                        std::string("cannot open '") + path + "' for writing");
  out << text;
  if (!out)
    throw inpipe::Error(inpipe::ErrorCode::Io,
                        std::string("write failed for '") + path + "'");
}

}  // namespace

extern "C" {

const char* inpipe_version(void) { return "0.1.0"; }

const char* inpipe_last_error(void) { return g_last_error.c_str(); }

const char* inpipe_status_string(inpipe_status status) {
  switch (status) {
    case INPIPE_OK: return "ok";
    case INPIPE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case INPIPE_ERR_OUT_OF_RANGE: return "out of range";
    case INPIPE_ERR_PARSE: return "parse error";
    case INPIPE_ERR_IO: return "i/o error";
    case INPIPE_ERR_DECODE: return "decode error";
    case INPIPE_ERR_STATE: return "invalid state";
    case INPIPE_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case INPIPE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* inpipe_result_string(inpipe_result result) {
  switch (result) {
    case INPIPE_RESULT_COMPLETED: return "completed";
    case INPIPE_RESULT_RUNNING: return "running";
    case INPIPE_RESULT_SLIPPED_OUT: return "slipped_out";
    case INPIPE_RESULT_OVERHEATED: return "overheated";
    case INPIPE_RESULT_TIMEOUT: return "timeout";
  }
  return "unknown";
}

inpipe_status inpipe_scenario_load(const char* path, inpipe_scenario** out) {
  INPIPE_REQUIRE(path && out);
  return guarded([&] {
    *out = new inpipe_scenario{inpipe::load_scenario(path)};
    return INPIPE_OK;
  });
}

inpipe_status inpipe_scenario_parse(const char* text, inpipe_scenario** out) {
  INPIPE_REQUIRE(text && out);
  return guarded([&] {
    *out = new inpipe_scenario{inpipe::parse_scenario(text)};
    return INPIPE_OK;
  });
}

void inpipe_scenario_free(inpipe_scenario* sc) { delete sc; }

inpipe_status inpipe_scenario_set_seed(inpipe_scenario* sc, uint64_t seed) {
  INPIPE_REQUIRE(sc);
  sc->value.seed = seed;
  return INPIPE_OK;
}

inpipe_status inpipe_scenario_set_max_time(inpipe_scenario* sc,
                                           double seconds) {
  INPIPE_REQUIRE(sc);
  INPIPE_REQUIRE(seconds > 0.0);
  sc->value.max_time_s = seconds;
  return INPIPE_OK;
}

inpipe_status inpipe_scenario_override_joint_duty(inpipe_scenario* sc,
                                                  double duty_pct) {
  INPIPE_REQUIRE(sc);
  return guarded([&] {
    sc->value.override_joint_duty(duty_pct);
    return INPIPE_OK;
  });
}

inpipe_status inpipe_scenario_total_length(const inpipe_scenario* sc,
                                           double* out_m) {
  INPIPE_REQUIRE(sc && out_m);
  return guarded([&] {
    *out_m = inpipe::geometry::build_network(sc->value.pipe).total_length();
    return INPIPE_OK;
  });
}

inpipe_status inpipe_run_create(const inpipe_scenario* sc, inpipe_run** out) {
  INPIPE_REQUIRE(sc && out);
  return guarded([&] {
    *out = new inpipe_run{inpipe::Simulation(sc->value)};
    return INPIPE_OK;
  });
}

void inpipe_run_free(inpipe_run* run) { delete run; }

inpipe_status inpipe_run_step(inpipe_run* run, uint64_t steps) {
  INPIPE_REQUIRE(run);
  return guarded([&] {
    for (uint64_t i = 0; i < steps && !run->sim.finished(); ++i) run->sim.step();
    return INPIPE_OK;
  });
}

inpipe_status inpipe_run_to_end(inpipe_run* run, inpipe_result* result,
                                double* t_s) {
  INPIPE_REQUIRE(run);
  return guarded([&] {
    const auto outcome = run->sim.run();
    if (result) *result = to_c(outcome.result);
    if (t_s) *t_s = outcome.t_s;
    return INPIPE_OK;
  });
}

inpipe_status inpipe_run_submit(inpipe_run* run, const char* action,
                                double value) {
  INPIPE_REQUIRE(run && action);
  return guarded([&] {
    if (run->sim.finished())
      return set_error(INPIPE_ERR_STATE, "run already finished");
    run->sim.submit({inpipe::parse_action_kind(action), value});
    return INPIPE_OK;
  });
}

inpipe_status inpipe_run_status(const inpipe_run* run, inpipe_result* result,
                                double* t_s) {
  INPIPE_REQUIRE(run);
  if (result) *result = to_c(run->sim.outcome().result);
  if (t_s) *t_s = run->sim.now_s();
  return INPIPE_OK;
}

inpipe_status inpipe_run_row_count(const inpipe_run* run, size_t* out) {
  INPIPE_REQUIRE(run && out);
  *out = run->sim.log().size();
  return INPIPE_OK;
}

inpipe_status inpipe_run_get_row(const inpipe_run* run, size_t index,
                                 inpipe_telemetry_row* out) {
  INPIPE_REQUIRE(run && out);
  const auto& log = run->sim.log();
  if (index >= log.size())
    return set_error(INPIPE_ERR_OUT_OF_RANGE, "row index out of range");
  const auto& r = log[index];
  *out = {r.t_s,           r.s_m,           r.D_m,
          r.theta_mid_deg, r.joint_duty,    r.drive_duty,
          r.est_torque_Nm, r.slip_margin_N, r.slip_flag ? 1 : 0,
          r.board_temp_C,  static_cast<inpipe_mode>(r.mode)};
  return INPIPE_OK;
}

inpipe_status inpipe_run_write_csv(const inpipe_run* run, const char* path) {
  INPIPE_REQUIRE(run && path);
  return guarded([&] {
    write_text(path, inpipe::telemetry_csv(run->sim.log()));
    return INPIPE_OK;
  });
}

inpipe_status inpipe_run_write_frames(const inpipe_run* run, const char* path) {
  INPIPE_REQUIRE(run && path);
  return guarded([&] {
    write_text(path, run->sim.frame_log_text());
    return INPIPE_OK;
  });
}

inpipe_status inpipe_duty_to_torque(inpipe_torque_mode mode, double duty_pct,
                                    double* out_Nm) {
  INPIPE_REQUIRE(out_Nm);
  return guarded([&] {
    *out_Nm = torque_map(mode).torque(duty_pct);
    return INPIPE_OK;
  });
}

inpipe_status inpipe_torque_map_write_csv(inpipe_torque_mode mode,
                                          const char* path) {
  INPIPE_REQUIRE(path);
  return guarded([&] {
    const auto map = torque_map(mode);
    std::string text = "duty_pct,torque_Nm\n";
    char line[64];
    for (std::size_t i = 0; i < map.grid().size(); ++i) {
      const double duty = static_cast<double>(i) * inpipe::actuation::kGridStepPct;
      std::snprintf(line, sizeof line, "%.1f,%.6f\n", duty, map.torque(duty));
      text += line;
    }
    write_text(path, text);
    return INPIPE_OK;
  });
}

void inpipe_calibration_defaults(inpipe_calibration_options* opts) {
  if (!opts) return;
  const inpipe::calibration::StepwiseNoise noise;
  opts->seed = 1;
  opts->noise = 1;
  opts->step_height_Nm = noise.step_height_Nm;
  opts->sensor_noise_Nm = noise.sensor_noise_Nm;
  opts->lever_m = inpipe::calibration::kRigLeverM;
  opts->ground_truth = INPIPE_TORQUE_ANCHORS;
}

inpipe_status inpipe_calibrate(const inpipe_calibration_options* opts,
                               const char* samples_path, const char* fit_path,
                               double coeffs_out[5], double* rmse_out) {
  INPIPE_REQUIRE(opts);
  return guarded([&] {
    namespace cal = inpipe::calibration;
    const auto map = torque_map(opts->ground_truth);
    cal::StepwiseNoise noise;
    noise.enabled = opts->noise != 0;
    noise.step_height_Nm = opts->step_height_Nm;
    noise.sensor_noise_Nm = opts->sensor_noise_Nm;
    const auto samples =
        cal::simulate_rig([&map](double d) { return map.torque(d); },
                          cal::SweepProtocol{}, noise, opts->seed, opts->lever_m);
    const auto fit = cal::fit_quartic(samples);
    if (samples_path) write_text(samples_path, cal::samples_csv(samples));
    if (fit_path) write_text(fit_path, cal::fit_report(fit));
    if (coeffs_out)
      for (int k = 0; k < 5; ++k) coeffs_out[k] = fit.coeffs[static_cast<std::size_t>(k)];
    if (rmse_out) *rmse_out = fit.rmse_Nm;
    return INPIPE_OK;
  });
}

inpipe_status inpipe_params_describe(char* buf, size_t capacity,
                                     size_t* needed) {
  return guarded([&] {
    const std::string text = inpipe::describe_defaults();
    if (needed) *needed = text.size() + 1;
    if (buf == nullptr || capacity < text.size() + 1)
      return set_error(INPIPE_ERR_BUFFER_TOO_SMALL,
                       "buffer needs " + std::to_string(text.size() + 1) + " bytes");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return INPIPE_OK;
  });
}

inpipe_status inpipe_can_encode_command(uint8_t node, uint8_t opcode,
                                        int16_t operand, inpipe_can_frame* out) {
  INPIPE_REQUIRE(out);
  return guarded([&] {
    if (opcode >= inpipe::can::kOpcodeCount)
      return set_error(INPIPE_ERR_INVALID_ARGUMENT, "unknown opcode");
    const auto f = inpipe::can::encode(
        {static_cast<inpipe::can::Opcode>(opcode), operand}, node);
    out->id = f.id;
    out->dlc = f.dlc;
    std::memcpy(out->data, f.data.data(), 8);
    return INPIPE_OK;
  });
}

inpipe_status inpipe_can_decode_command(const inpipe_can_frame* frame,
                                        uint8_t* node, uint8_t* opcode,
                                        int16_t* operand) {
  INPIPE_REQUIRE(frame);
  inpipe::can::CanFrame f;
  f.id = frame->id;
  f.dlc = frame->dlc;
  std::memcpy(f.data.data(), frame->data, 8);
  const auto d = inpipe::can::decode(f);
  if (!d.ok())
    return set_error(INPIPE_ERR_DECODE, std::string(inpipe::can::to_string(d.status)));
  if (d.kind != inpipe::can::Decoded::Kind::Command)
    return set_error(INPIPE_ERR_DECODE, "not a command frame");
  if (node) *node = d.node;
  if (opcode) *opcode = static_cast<uint8_t>(d.command.op);
  if (operand) *operand = d.command.operand;
  return INPIPE_OK;
}

inpipe_status inpipe_gateway_create(const inpipe_scenario* sc,
                                    const char* address, uint16_t port,
                                    double speed, inpipe_gateway** out) {
  INPIPE_REQUIRE(sc && out);
  INPIPE_REQUIRE(speed >= 0.0);
  return guarded([&] {
    inpipe::GatewayOptions opts;
    if (address) opts.address = address;
    opts.port = port;
    opts.speed = speed;
    *out = new inpipe_gateway{inpipe::Gateway(sc->value, opts)};
    return INPIPE_OK;
  });
}

void inpipe_gateway_free(inpipe_gateway* gw) { delete gw; }

uint16_t inpipe_gateway_port(const inpipe_gateway* gw) {
  return gw ? gw->gw.port() : 0;
}

inpipe_status inpipe_gateway_run(inpipe_gateway* gw) {
  INPIPE_REQUIRE(gw);
  return guarded([&] {
    gw->gw.run();
    return INPIPE_OK;
  });
}

void inpipe_gateway_stop(inpipe_gateway* gw) {
  if (gw) gw->gw.stop();
}

}  // extern "C"
