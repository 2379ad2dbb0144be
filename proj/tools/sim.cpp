// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <csignal>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inpipe/inpipe.h"

namespace {

constexpr int kExitError = 1;

inpipe_gateway* g_gateway = nullptr;

extern "C" void on_signal(int) {
  if (g_gateway) inpipe_gateway_stop(g_gateway);
}

int fail(inpipe_status st, const std::string& what) {
  std::fprintf(stderr, "sim: %s: %s (%s)\n", what.c_str(), inpipe_last_error(),
               inpipe_status_string(st));
  return kExitError;
}

struct ScenarioDeleter {
  void operator()(inpipe_scenario* p) const { inpipe_scenario_free(p); }
};
struct RunDeleter {
  void operator()(inpipe_run* p) const { inpipe_run_free(p); }
};
struct GatewayDeleter {
  void operator()(inpipe_gateway* p) const { inpipe_gateway_free(p); }
};
using ScenarioPtr = std::unique_ptr<inpipe_scenario, ScenarioDeleter>;

struct ScenarioArgs {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<double> joint_duty;
  std::optional<double> max_time;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--scenario", a.path, "scenario file (.scn)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "RNG seed, overrides the scenario");
  cmd->add_option("--joint-duty", a.joint_duty,
                  "replace every scripted joint_duty value (percent)")
      ->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--max-time", a.max_time, "timeout in simulated seconds")
      ->check(CLI::PositiveNumber);
}

int load(const ScenarioArgs& a, ScenarioPtr& out) {
  inpipe_scenario* raw = nullptr;
  if (auto st = inpipe_scenario_load(a.path.c_str(), &raw); st != INPIPE_OK)
    return fail(st, "loading scenario");
  out.reset(raw);
  inpipe_status st = INPIPE_OK;
  if (a.seed) st = inpipe_scenario_set_seed(raw, *a.seed);
  if (st == INPIPE_OK && a.joint_duty)
    st = inpipe_scenario_override_joint_duty(raw, *a.joint_duty);
  if (st == INPIPE_OK && a.max_time)
    st = inpipe_scenario_set_max_time(raw, *a.max_time);
  return st == INPIPE_OK ? 0 : fail(st, "applying overrides");
}

int cmd_run(const ScenarioArgs& a, const std::string& out_path,
            const std::string& frames_path) {
  ScenarioPtr sc;
  if (int rc = load(a, sc)) return rc;
  inpipe_run* raw = nullptr;
  if (auto st = inpipe_run_create(sc.get(), &raw); st != INPIPE_OK)
    return fail(st, "creating run");
  std::unique_ptr<inpipe_run, RunDeleter> run(raw);

  inpipe_result result = INPIPE_RESULT_RUNNING;
  double t = 0.0;
  if (auto st = inpipe_run_to_end(run.get(), &result, &t); st != INPIPE_OK)
    return fail(st, "running");
  if (auto st = inpipe_run_write_csv(run.get(), out_path.c_str()); st != INPIPE_OK)
    return fail(st, "writing telemetry");
  if (!frames_path.empty())
    if (auto st = inpipe_run_write_frames(run.get(), frames_path.c_str()); st != INPIPE_OK)
      return fail(st, "writing frame log");
  std::fprintf(stderr, "%s at t=%.3f s\n", inpipe_result_string(result), t);
  return static_cast<int>(result);
}

int cmd_calibrate(std::uint64_t seed, bool no_noise, const std::string& out,
                  const std::string& fit) {
  inpipe_calibration_options opts;
  inpipe_calibration_defaults(&opts);
  opts.seed = seed;
  opts.noise = no_noise ? 0 : 1;
  double coeffs[5];
  double rmse = 0.0;
  auto st = inpipe_calibrate(&opts, out.c_str(), fit.empty() ? nullptr : fit.c_str(),
                             coeffs, &rmse);
  if (st != INPIPE_OK) return fail(st, "calibrating");
  std::fprintf(stderr, "rmse %.4f Nm\n", rmse);
  return 0;
}

int cmd_torquemap(const std::string& mode, const std::string& out) {
  const auto m = mode == "poly" ? INPIPE_TORQUE_POLY : INPIPE_TORQUE_ANCHORS;
  if (auto st = inpipe_torque_map_write_csv(m, out.c_str()); st != INPIPE_OK)
    return fail(st, "writing torque map");
  return 0;
}

int cmd_serve(const ScenarioArgs& a, const std::string& address, int port,
              double speed) {
  ScenarioPtr sc;
  if (int rc = load(a, sc)) return rc;
  inpipe_gateway* raw = nullptr;
  if (auto st = inpipe_gateway_create(sc.get(), address.c_str(),
                                      static_cast<std::uint16_t>(port), speed, &raw);
      st != INPIPE_OK)
    return fail(st, "starting gateway");
  std::unique_ptr<inpipe_gateway, GatewayDeleter> gw(raw);
  std::fprintf(stderr, "listening on ws://%s:%u/\n", address.c_str(),
               static_cast<unsigned>(inpipe_gateway_port(gw.get())));
  g_gateway = gw.get();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto st = inpipe_gateway_run(gw.get());
  g_gateway = nullptr;
  return st == INPIPE_OK ? 0 : fail(st, "serving");
}

int cmd_params() {
  std::size_t needed = 0;
  inpipe_params_describe(nullptr, 0, &needed);
  std::vector<char> buf(needed);
  if (auto st = inpipe_params_describe(buf.data(), buf.size(), &needed); st != INPIPE_OK)
    return fail(st, "describing parameters");
  std::fputs(buf.data(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-pipe robot simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(inpipe_version()));

  ScenarioArgs run_args;
  std::string run_out = "-";
  std::string run_frames;
  auto* run = app.add_subcommand("run", "run a scripted mission");
  add_scenario_options(run, run_args);
  run->add_option("--out", run_out, "telemetry CSV path, '-' for stdout");
  run->add_option("--frames", run_frames, "CAN frame log path");

  std::uint64_t cal_seed = 1;
  bool cal_no_noise = false;
  std::string cal_out;
  std::string cal_fit;
  auto* cal = app.add_subcommand("calibrate", "simulate the torque rig and fit the quartic");
  cal->add_option("--seed", cal_seed, "RNG seed");
  cal->add_option("--out", cal_out, "samples CSV path")->required();
  cal->add_option("--fit", cal_fit, "fit report path");
  cal->add_flag("--no-noise", cal_no_noise, "disable stepwise and sensor noise");

  std::string map_mode = "anchors";
  std::string map_out = "-";
  bool map_csv = true;
  auto* map = app.add_subcommand("torquemap", "print the duty to torque table");
  map->add_option("--mode", map_mode, "anchors or poly")
      ->check(CLI::IsMember({"anchors", "poly"}));
  map->add_flag("--csv", map_csv, "CSV output (the only format)");
  map->add_option("--out", map_out, "output path, '-' for stdout");

  ScenarioArgs serve_args;
  std::string address = "127.0.0.1";
  int port = 8765;
  double speed = 0.0;
  bool realtime = false;
  auto* serve = app.add_subcommand("serve", "run the WebSocket gateway");
  add_scenario_options(serve, serve_args);
  serve->add_option("--address", address, "bind address");
  serve->add_option("--port", port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
  auto* speed_opt = serve->add_option("--speed", speed, "simulated seconds per wall second")
                        ->check(CLI::NonNegativeNumber);
  serve->add_flag("--realtime", realtime, "same as --speed 1")->excludes(speed_opt);

  bool params_show = false;
  auto* params = app.add_subcommand("params", "print default parameters");
  params->add_flag("--show", params_show, "print as a [robot] section");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(run_args, run_out, run_frames);
  if (*cal) return cmd_calibrate(cal_seed, cal_no_noise, cal_out, cal_fit);
  if (*map) return cmd_torquemap(map_mode, map_out);
  if (*serve) return cmd_serve(serve_args, address, port, realtime ? 1.0 : speed);
  if (*params) return cmd_params();
  return kExitError;
}
