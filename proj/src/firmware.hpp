// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "canbus.hpp"

namespace inpipe::firmware {

enum class Mode { Idle, Drive, Roll, HoldAngle, Estop };

std::string_view to_string(Mode mode);

/// What a board drives: roll wheels, a drive wheel, or the middle joint
/// plus its drive wheel.
enum class Role { Roll, Drive, JointDrive };

Role role_of(std::uint8_t node);

inline constexpr double kContinuousJointDutyCap = 50.0;

struct ControllerGains {
  double kp_duty_per_rad = 120.0;
  double ki_duty_per_rad_s = 40.0;
};

struct FirmwareState {
  Mode mode = Mode::Idle;
  double drive_duty_pct = 0.0;  // signed
  double roll_duty_pct = 0.0;   // signed
  double joint_duty_pct = 0.0;  // signed while holding an angle
  double target_angle_rad = 0.0;
  bool angle_hold = false;
  double integral_duty = 0.0;
  int last_adc_code = 0;
  bool peak_mode = false;
  bool nak_pending = false;

  double joint_duty_cap() const {
    return peak_mode ? 100.0 : kContinuousJointDutyCap;
  }
};

struct Outputs {
  double drive_duty_pct = 0.0;
  double roll_duty_pct = 0.0;
  double joint_duty_pct = 0.0;
};

/// Duties actually applied to the motor drivers. Estop forces zeros.
Outputs outputs(const FirmwareState& fs);

struct CommandResult {
  FirmwareState state;
  bool accepted = true;
};

/// Mode transition table. Rejected commands set `nak_pending`.
CommandResult handle_command(const FirmwareState& fs, const can::Command& cmd,
                             Role role);
FirmwareState emergency_stop(const FirmwareState& fs);

/// PI on angle error with conditional-integration anti-windup. Returns the
/// state with the new signed joint duty; a no-op unless an angle is held.
FirmwareState angle_controller_step(const FirmwareState& fs,
                                    double measured_angle_rad, double dt,
                                    const ControllerGains& gains = {});

/// Potentiometer on a 5 V supply, divided down to the 3.3 V ADC.
struct PotModel {
  double v_supply = 5.0;
  double divider_ratio = 3.3 / 5.0;
  double adc_ref_v = 3.3;
  int adc_bits = 12;
  double angle_fullscale_rad = 150.0 * std::numbers::pi / 180.0;
  double noise_sigma_v = 0.0;

  int max_code() const { return (1 << adc_bits) - 1; }
  double lsb_angle_rad() const { return angle_fullscale_rad / max_code(); }
  double code_to_angle(int code) const {
    return angle_fullscale_rad * code / max_code();
  }
};

struct PotReading {
  int code = 0;
  bool clamped = false;
};

/// Rounds half away from zero, so half scale reads 2048 on 12 bits. The
/// generator is only drawn from when noise is enabled.
PotReading pot_read(const PotModel& pot, double theta_rad,
                    std::mt19937_64* rng = nullptr);

/// Unbraced middle joint: angular rate proportional to signed duty.
struct JointPlant {
  double no_load_rate_rad_s = 6.6;
  double min_rad = 0.0;
  double max_rad = 150.0 * std::numbers::pi / 180.0;

  double step(double theta_rad, double duty_pct, double dt) const;
};

/// One emulated board on the bus.
class FirmwareNode {
 public:
  FirmwareNode(std::uint8_t node, PotModel pot, ControllerGains gains,
               bool peak_mode);

  std::uint8_t node() const { return node_; }
  Role role() const { return role_; }
  const FirmwareState& state() const { return state_; }
  const PotModel& pot() const { return pot_; }

  /// Decodes and applies a command frame addressed to this node.
  void on_frame(const can::CanFrame& frame);
  void apply(const can::Command& cmd);

  /// 10 ms control tick: samples the pot and runs the angle loop.
  void control_tick(double true_angle_rad, double dt, std::mt19937_64& rng);

  double measured_angle_rad() const {
    return pot_.code_to_angle(state_.last_adc_code);
  }

  /// Builds the telemetry record and clears the NAK latch.
  can::Telemetry telemetry(double est_torque_Nm, double board_temp_C,
                           bool slipping);

 private:
  std::uint8_t node_;
  Role role_;
  PotModel pot_;
  ControllerGains gains_;
  FirmwareState state_;
};

}  // namespace inpipe::firmware
