// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "actuation.hpp"
#include "firmware.hpp"
#include "geometry.hpp"
#include "mechanics.hpp"
#include "robot_model.hpp"

namespace inpipe {

/// Operator-level action. The host routes each one onto CAN commands for
/// the boards that implement it.
enum class ActionKind {
  Stop,
  Drive,
  Roll,
  JointDuty,
  JointAngle,  // value in degrees
  Estop,
  ResetEstop,
};

std::string_view to_string(ActionKind kind);
ActionKind parse_action_kind(std::string_view verb);

struct Action {
  ActionKind kind = ActionKind::Stop;
  double value = 0.0;

  bool operator==(const Action&) const = default;
};

/// Throws inpipe::Error(OutOfRange) when the value is outside what the
/// command encoding can carry.
void validate(const Action& action);

struct MissionStep {
  double t_s = 0.0;
  Action action;
};

/// Everything a run needs. Defaults reproduce the shipped robot.
struct Scenario {
  std::string name;
  std::string description;  // leading comment block of the file

  std::vector<geometry::PipeSegment> pipe;
  robot::RobotParams robot;
  actuation::ThermalConstants thermal;
  actuation::TorqueMapMode torque_map = actuation::TorqueMapMode::Anchors;
  firmware::PotModel pot;
  firmware::ControllerGains gains;
  bool peak_mode = false;
  mechanics::EnvironmentProfile env;

  std::vector<MissionStep> mission;
  bool interactive = false;
  std::uint64_t seed = 1;
  double dt_s = 0.001;
  double max_time_s = 600.0;
  double stall_window_s = 2.0;
  double bus_latency_s = 0.001;
  double bus_loss = 0.0;

  /// Checks cross-field invariants; throws inpipe::Error.
  void validate() const;

  /// Replaces the value of every joint-duty step in the mission.
  void override_joint_duty(double duty_pct);
};

/// Parses the line-oriented scenario format. Errors carry `origin:line:`.
Scenario parse_scenario(std::string_view text,
                        std::string_view origin = "<scenario>");
Scenario load_scenario(const std::string& path);

/// `[robot]` section holding every default, in the same grammar the parser
/// accepts, followed by the environment defaults as comments.
std::string describe_defaults();

}  // namespace inpipe
