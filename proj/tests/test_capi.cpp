// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <chrono>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "inpipe/inpipe.h"

namespace {

const std::string kDir = INPIPE_SCENARIO_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const char* name) {
  return ::testing::TempDir() + name;
}

TEST(CApi, VersionAndStrings) {
  EXPECT_STREQ(inpipe_version(), "0.1.0");
  EXPECT_STREQ(inpipe_status_string(INPIPE_ERR_PARSE), "parse error");
  EXPECT_STREQ(inpipe_result_string(INPIPE_RESULT_SLIPPED_OUT), "slipped_out");
}

TEST(CApi, NullArgumentsRejected) {
  EXPECT_EQ(inpipe_scenario_load(nullptr, nullptr), INPIPE_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(inpipe_last_error()), "");
  EXPECT_EQ(inpipe_run_create(nullptr, nullptr), INPIPE_ERR_INVALID_ARGUMENT);
  inpipe_scenario_free(nullptr);
  inpipe_run_free(nullptr);
  inpipe_gateway_free(nullptr);
}

TEST(CApi, ParseErrorReportsLine) {
  inpipe_scenario* sc = nullptr;
  EXPECT_EQ(inpipe_scenario_parse("[pipe]\nstraight 1\n", &sc), INPIPE_ERR_PARSE);
  EXPECT_EQ(sc, nullptr);
  EXPECT_NE(std::string(inpipe_last_error()).find(":2:"), std::string::npos);
  EXPECT_EQ(inpipe_scenario_load("/nonexistent.scn", &sc), INPIPE_ERR_IO);
}

TEST(CApi, RunToCompletion) {
  inpipe_scenario* sc = nullptr;
  ASSERT_EQ(inpipe_scenario_load((kDir + "/vertical_3in_course.scn").c_str(), &sc),
            INPIPE_OK);
  double total = 0;
  ASSERT_EQ(inpipe_scenario_total_length(sc, &total), INPIPE_OK);
  EXPECT_GT(total, 1.9);

  inpipe_run* run = nullptr;
  ASSERT_EQ(inpipe_run_create(sc, &run), INPIPE_OK);
  inpipe_result result = INPIPE_RESULT_RUNNING;
  double t = 0;
  ASSERT_EQ(inpipe_run_to_end(run, &result, &t), INPIPE_OK);
  EXPECT_EQ(result, INPIPE_RESULT_COMPLETED);
  EXPECT_EQ(inpipe_run_submit(run, "drive", 10), INPIPE_ERR_STATE);

  std::size_t rows = 0;
  ASSERT_EQ(inpipe_run_row_count(run, &rows), INPIPE_OK);
  inpipe_telemetry_row last{};
  ASSERT_EQ(inpipe_run_get_row(run, rows - 1, &last), INPIPE_OK);
  EXPECT_NEAR(last.s_m, total, 1e-6);
  EXPECT_EQ(inpipe_run_get_row(run, rows, &last), INPIPE_ERR_OUT_OF_RANGE);

  const auto csv = temp_path("capi_run.csv");
  const auto frames = temp_path("capi_frames.txt");
  ASSERT_EQ(inpipe_run_write_csv(run, csv.c_str()), INPIPE_OK);
  ASSERT_EQ(inpipe_run_write_frames(run, frames.c_str()), INPIPE_OK);
  EXPECT_EQ(slurp(csv).rfind("t_s,s_m,D_m,", 0), 0u);
  EXPECT_FALSE(slurp(frames).empty());
  EXPECT_EQ(inpipe_run_write_csv(run, "/nonexistent/dir/x.csv"), INPIPE_ERR_IO);

  inpipe_run_free(run);
  inpipe_scenario_free(sc);
}

TEST(CApi, OverridesAndStepping) {
  inpipe_scenario* sc = nullptr;
  ASSERT_EQ(inpipe_scenario_load((kDir + "/field_sewage.scn").c_str(), &sc), INPIPE_OK);
  ASSERT_EQ(inpipe_scenario_override_joint_duty(sc, 25), INPIPE_OK);
  EXPECT_EQ(inpipe_scenario_override_joint_duty(sc, 125), INPIPE_ERR_OUT_OF_RANGE);
  EXPECT_EQ(inpipe_scenario_set_max_time(sc, -1), INPIPE_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(inpipe_scenario_set_seed(sc, 99), INPIPE_OK);

  inpipe_run* run = nullptr;
  ASSERT_EQ(inpipe_run_create(sc, &run), INPIPE_OK);
  ASSERT_EQ(inpipe_run_step(run, 1000), INPIPE_OK);
  inpipe_result result;
  double t = 0;
  ASSERT_EQ(inpipe_run_status(run, &result, &t), INPIPE_OK);
  EXPECT_EQ(result, INPIPE_RESULT_RUNNING);
  EXPECT_NEAR(t, 1.0, 1e-9);
  EXPECT_EQ(inpipe_run_submit(run, "teleport", 1), INPIPE_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(inpipe_run_to_end(run, &result, &t), INPIPE_OK);
  EXPECT_EQ(result, INPIPE_RESULT_SLIPPED_OUT);
  inpipe_run_free(run);
  inpipe_scenario_free(sc);
}

TEST(CApi, TorqueAndCalibration) {
  double tau = 0;
  ASSERT_EQ(inpipe_duty_to_torque(INPIPE_TORQUE_ANCHORS, 50, &tau), INPIPE_OK);
  EXPECT_DOUBLE_EQ(tau, 2.55);
  EXPECT_EQ(inpipe_duty_to_torque(INPIPE_TORQUE_POLY, 101, &tau), INPIPE_ERR_OUT_OF_RANGE);
  EXPECT_EQ(inpipe_duty_to_torque(static_cast<inpipe_torque_mode>(7), 1, &tau),
            INPIPE_ERR_INVALID_ARGUMENT);

  const auto map = temp_path("capi_map.csv");
  ASSERT_EQ(inpipe_torque_map_write_csv(INPIPE_TORQUE_POLY, map.c_str()), INPIPE_OK);
  const auto text = slurp(map);
  EXPECT_EQ(text.rfind("duty_pct,torque_Nm\n0.0,0.000000\n", 0), 0u);
  EXPECT_NE(text.find("\n10.0,0.419505\n"), std::string::npos);

  inpipe_calibration_options opts;
  inpipe_calibration_defaults(&opts);
  EXPECT_EQ(opts.lever_m, 0.24);
  double coeffs[5];
  double rmse = 1;
  ASSERT_EQ(inpipe_calibrate(&opts, nullptr, nullptr, coeffs, &rmse), INPIPE_OK);
  EXPECT_LE(rmse, 0.08);
  opts.lever_m = 0;
  EXPECT_EQ(inpipe_calibrate(&opts, nullptr, nullptr, coeffs, &rmse),
            INPIPE_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ParamsBuffer) {
  std::size_t needed = 0;
  EXPECT_EQ(inpipe_params_describe(nullptr, 0, &needed), INPIPE_ERR_BUFFER_TOO_SMALL);
  ASSERT_GT(needed, 10u);
  std::vector<char> buf(needed);
  ASSERT_EQ(inpipe_params_describe(buf.data(), buf.size(), &needed), INPIPE_OK);
  EXPECT_NE(std::string(buf.data()).find("end_link_m = 0.12"), std::string::npos);
}

TEST(CApi, Codec) {
  inpipe_can_frame f{};
  ASSERT_EQ(inpipe_can_encode_command(2, 0x03, 4405, &f), INPIPE_OK);
  EXPECT_EQ(f.id, 0x102);
  EXPECT_EQ(f.dlc, 3);
  EXPECT_EQ(f.data[1], 0x35);
  uint8_t node = 0, op = 0;
  int16_t operand = 0;
  ASSERT_EQ(inpipe_can_decode_command(&f, &node, &op, &operand), INPIPE_OK);
  EXPECT_EQ(node, 2);
  EXPECT_EQ(op, 3);
  EXPECT_EQ(operand, 4405);
  f.data[0] = 0x42;
  EXPECT_EQ(inpipe_can_decode_command(&f, &node, &op, &operand), INPIPE_ERR_DECODE);
  EXPECT_EQ(inpipe_can_encode_command(1, 0x01, 120, &f), INPIPE_ERR_OUT_OF_RANGE);
  EXPECT_EQ(inpipe_can_encode_command(1, 0x09, 0, &f), INPIPE_ERR_INVALID_ARGUMENT);
}

TEST(CApi, GatewayLifecycle) {
  inpipe_scenario* sc = nullptr;
  ASSERT_EQ(inpipe_scenario_load((kDir + "/field_sewage_live.scn").c_str(), &sc),
            INPIPE_OK);
  inpipe_gateway* gw = nullptr;
  ASSERT_EQ(inpipe_gateway_create(sc, "127.0.0.1", 0, 1.0, &gw), INPIPE_OK);
  EXPECT_NE(inpipe_gateway_port(gw), 0);
  inpipe_gateway* clash = nullptr;
  EXPECT_EQ(inpipe_gateway_create(sc, "127.0.0.1", inpipe_gateway_port(gw), 1.0, &clash),
            INPIPE_ERR_IO);
  EXPECT_EQ(inpipe_gateway_create(sc, "not-an-ip", 0, 1.0, &clash),
            INPIPE_ERR_INVALID_ARGUMENT);
  std::thread owner([gw] { EXPECT_EQ(inpipe_gateway_run(gw), INPIPE_OK); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  inpipe_gateway_stop(gw);
  owner.join();
  inpipe_gateway_free(gw);
  inpipe_scenario_free(sc);
}

}  // namespace
