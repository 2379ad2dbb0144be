// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include <gtest/gtest.h>

#include "error.hpp"
#include "geometry.hpp"
#include "scenario.hpp"

namespace inpipe {
namespace {

const std::string kDir = INPIPE_SCENARIO_DIR;

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text, "t.scn");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

TEST(Scenario, MinimalParse) {
  const auto sc = parse_scenario(
      "# Short course\n# second line\n\n[pipe]\nstraight 1.0 3in 0  # flat\n"
      "[mission]\nat 0 drive 50\nat 1.5 stop\n");
  EXPECT_EQ(sc.description, "Short course\nsecond line");
  ASSERT_EQ(sc.pipe.size(), 1u);
  EXPECT_EQ(sc.pipe[0].diameter_in_m, geometry::kBore3in);
  ASSERT_EQ(sc.mission.size(), 2u);
  EXPECT_EQ(sc.mission[1].action.kind, ActionKind::Stop);
  EXPECT_EQ(sc.mission[0].action.value, 50.0);
  EXPECT_EQ(sc.env.base().label, "dry");
}

TEST(Scenario, FullGrammar) {
  const auto sc = parse_scenario(R"(
[pipe]
straight 0.4 3in 0
increaser 3in 4in 0
increaser 0.2 4in 0.120 0
bend 0.128 90 0.120 0.5

[robot]
total_mass_kg = 2.0
thermal_soft_limit_C = 90
peak_mode = yes
torque_map = poly
pot_fullscale_deg 180
kp_duty_per_rad = 100

[env]
env mu=0.5 cable=1 label=dry
env mu=0.2 cable=1 label=sewage from=0.5 to=0.6

[mission]
seed 42
dt 0.002
max_time 60
stall_window 3
bus_latency_ms 2
bus_loss 0.01
at 0 joint_angle 44.05
at 0 joint_duty 30
at 0.5 roll -20
at 1 estop
at 2 reset_estop
)");
  ASSERT_EQ(sc.pipe.size(), 4u);
  EXPECT_EQ(sc.pipe[1].length_m, geometry::kDefaultIncreaserLength);
  EXPECT_EQ(sc.robot.total_mass_kg, 2.0);
  EXPECT_EQ(sc.thermal.soft_limit_C, 90.0);
  EXPECT_TRUE(sc.peak_mode);
  EXPECT_EQ(sc.torque_map, actuation::TorqueMapMode::Polynomial);
  EXPECT_NEAR(sc.pot.angle_fullscale_rad, 3.14159265358979, 1e-12);
  EXPECT_EQ(sc.gains.kp_duty_per_rad, 100.0);
  EXPECT_EQ(sc.env.at(0.55).label, "sewage");
  EXPECT_EQ(sc.seed, 42u);
  EXPECT_EQ(sc.dt_s, 0.002);
  EXPECT_EQ(sc.stall_window_s, 3.0);
  EXPECT_DOUBLE_EQ(sc.bus_latency_s, 0.002);
  EXPECT_EQ(sc.mission.size(), 5u);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  const std::string base = "[pipe]\nstraight 1 3in 0\n";
  EXPECT_EQ(parse_error("[pipe]\nstraight 1 3in\n"),
            "t.scn:2: usage: straight <len_m> <D_m> <incl>");
  EXPECT_EQ(parse_error("[pipe]\ntube 1 3in 0\n"),
            "t.scn:2: unknown pipe segment 'tube'");
  EXPECT_EQ(parse_error("\n\n[pipes]\n"), "t.scn:3: unknown section [pipes]");
  EXPECT_EQ(parse_error("straight 1 3in 0\n"),
            "t.scn:1: content before the first section header");
  EXPECT_EQ(parse_error(base + "[robot]\nwheel_radius_m = abc\n"),
            "t.scn:4: expected a number, got 'abc'");
  EXPECT_EQ(parse_error(base + "[robot]\ncolor = red\n"),
            "t.scn:4: unknown robot parameter 'color'");
  EXPECT_EQ(parse_error(base + "[env]\nenv mu=0 cable=0 label=x\n"),
            "t.scn:4: mu must be in (0, 1.5]");
  EXPECT_EQ(parse_error(base + "[mission]\nat 0 fly 3\n"),
            "t.scn:4: unknown action 'fly'");
  EXPECT_EQ(parse_error(base + "[mission]\nat 2 stop\nat 1 stop\n"),
            "t.scn:5: mission times must be non-decreasing");
  EXPECT_EQ(parse_error(base + "[mission]\nat 0 drive\n"),
            "t.scn:4: drive needs a value");
  EXPECT_EQ(parse_error(base + "[mission]\nat 0 stop 3\n"),
            "t.scn:4: stop takes no value");
  EXPECT_NE(parse_error(base + "[mission]\nat 0 joint_duty 101\n").find("t.scn:4: "),
            std::string::npos);
  EXPECT_NE(parse_error("[pipe]\nstraight 1 3in 0\nstraight 1 4in 0\n").find("t.scn: "),
            std::string::npos);
  EXPECT_NE(parse_error("[mission]\nat 0 stop\n").find("no [pipe]"), std::string::npos);
}

TEST(Scenario, OverrideJointDuty) {
  auto sc = parse_scenario("[pipe]\nstraight 1 3in 0\n[mission]\n"
                           "at 0 joint_duty 25\nat 0 drive 100\nat 5 joint_duty 30\n");
  sc.override_joint_duty(50);
  EXPECT_EQ(sc.mission[0].action.value, 50.0);
  EXPECT_EQ(sc.mission[1].action.value, 100.0);
  EXPECT_EQ(sc.mission[2].action.value, 50.0);
  EXPECT_THROW(sc.override_joint_duty(120), Error);
}

TEST(Scenario, ShippedFilesLoad) {
  for (const char* name : {"vertical_3in_course", "vertical_4in_course",
                           "increaser_course", "field_sewage",
                           "field_sewage_hold", "field_sewage_live"}) {
    const auto sc = load_scenario(kDir + "/" + name + ".scn");
    EXPECT_EQ(sc.name, name);
    EXPECT_NE(sc.description.find("Assumption"), std::string::npos) << name;
    EXPECT_NO_THROW(geometry::build_network(sc.pipe));
  }
  const auto field = load_scenario(kDir + "/field_sewage.scn");
  EXPECT_NEAR(geometry::build_network(field.pipe).total_length(), 3.0, 1e-6);
  EXPECT_TRUE(load_scenario(kDir + "/field_sewage_live.scn").interactive);
}

TEST(Scenario, MissingFile) {
  try {
    load_scenario(kDir + "/does_not_exist.scn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Scenario, DefaultsDescribeRoundTrips) {
  const auto text = describe_defaults();
  const auto sc = parse_scenario(text + "\n[pipe]\nstraight 1 3in 0\n");
  const Scenario defaults;
  EXPECT_EQ(sc.robot.end_link_m, defaults.robot.end_link_m);
  EXPECT_EQ(sc.thermal.c_th_J_per_C, defaults.thermal.c_th_J_per_C);
  EXPECT_EQ(sc.gains.ki_duty_per_rad_s, defaults.gains.ki_duty_per_rad_s);
}

}  // namespace
}  // namespace inpipe
