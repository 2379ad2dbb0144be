// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "firmware.hpp"

#include <algorithm>
#include <cmath>

namespace inpipe::firmware {
namespace {

bool supports(Role role, can::Opcode op) {
  using can::Opcode;
  switch (op) {
    case Opcode::Stop:
    case Opcode::Estop:
    case Opcode::ResetEstop:
      return true;
    case Opcode::Drive:
      return role != Role::Roll;
    case Opcode::Roll:
      return role == Role::Roll;
    case Opcode::SetJointAngle:
    case Opcode::SetJointDuty:
      return role == Role::JointDrive;
  }
  return false;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on raw 53-bit uniforms keeps the stream portable.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::int16_t saturate_i16(double v) {
  return static_cast<std::int16_t>(
      std::clamp(std::lround(v), long{INT16_MIN}, long{INT16_MAX}));
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Idle: return "idle";
    case Mode::Drive: return "drive";
    case Mode::Roll: return "roll";
    case Mode::HoldAngle: return "hold_angle";
    case Mode::Estop: return "estop";
  }
  return "?";
}

Role role_of(std::uint8_t node) {
  switch (node) {
    case can::kFrontRoll:
    case can::kRearRoll:
      return Role::Roll;
    case can::kJ2JointDrive:
      return Role::JointDrive;
    default:
      return Role::Drive;
  }
}

Outputs outputs(const FirmwareState& fs) {
  if (fs.mode == Mode::Estop) return {};
  return {fs.drive_duty_pct, fs.roll_duty_pct, fs.joint_duty_pct};
}

FirmwareState emergency_stop(const FirmwareState& fs) {
  FirmwareState next = fs;
  next.mode = Mode::Estop;
  next.drive_duty_pct = next.roll_duty_pct = next.joint_duty_pct = 0.0;
  next.angle_hold = false;
  next.integral_duty = 0.0;
  return next;
}

CommandResult handle_command(const FirmwareState& fs, const can::Command& cmd,
                             Role role) {
  using can::Opcode;
  CommandResult r{fs, true};
  FirmwareState& s = r.state;

  auto reject = [&r]() {
    r.accepted = false;
    r.state.nak_pending = true;
    return r;
  };

  if (!supports(role, cmd.op) || !can::operand_in_range(cmd.op, cmd.operand))
    return reject();

  if (cmd.op == Opcode::Estop) {
    r.state = emergency_stop(fs);
    return r;
  }
  if (fs.mode == Mode::Estop) {
    if (cmd.op != Opcode::ResetEstop) return reject();
    s.mode = Mode::Idle;
    return r;
  }

  switch (cmd.op) {
    case Opcode::Stop:
      s.mode = Mode::Idle;
      s.drive_duty_pct = s.roll_duty_pct = s.joint_duty_pct = 0.0;
      s.angle_hold = false;
      s.integral_duty = 0.0;
      break;
    case Opcode::Drive:
      s.mode = Mode::Drive;
      s.drive_duty_pct = cmd.operand;
      break;
    case Opcode::Roll:
      s.mode = Mode::Roll;
      s.roll_duty_pct = cmd.operand;
      break;
    case Opcode::SetJointAngle:
      s.mode = Mode::HoldAngle;
      s.target_angle_rad = cmd.operand / 100.0 * std::numbers::pi / 180.0;
      if (!s.angle_hold) s.integral_duty = 0.0;
      s.angle_hold = true;
      break;
    case Opcode::SetJointDuty:
      s.angle_hold = false;
      s.integral_duty = 0.0;
      s.joint_duty_pct = std::min<double>(cmd.operand, s.joint_duty_cap());
      if (s.mode == Mode::HoldAngle)
        s.mode = s.drive_duty_pct != 0.0 ? Mode::Drive : Mode::Idle;
      break;
    case Opcode::ResetEstop:
    case Opcode::Estop:
      break;
  }
  return r;
}

FirmwareState angle_controller_step(const FirmwareState& fs,
                                    double measured_angle_rad, double dt,
                                    const ControllerGains& gains) {
  if (!fs.angle_hold || fs.mode == Mode::Estop) return fs;
  FirmwareState next = fs;
  const double cap = fs.joint_duty_cap();
  const double error = fs.target_angle_rad - measured_angle_rad;
  const double u = gains.kp_duty_per_rad * error + fs.integral_duty;
  if (std::abs(u) > cap) {
    next.joint_duty_pct = std::clamp(u, -cap, cap);
  } else {
    next.joint_duty_pct = u;
    next.integral_duty += gains.ki_duty_per_rad_s * error * dt;
  }
  return next;
}

PotReading pot_read(const PotModel& pot, double theta_rad,
                    std::mt19937_64* rng) {
  PotReading r;
  double theta = theta_rad;
  if (theta < 0.0 || theta > pot.angle_fullscale_rad) {
    r.clamped = true;
    theta = std::clamp(theta, 0.0, pot.angle_fullscale_rad);
  }
  const double v_pot = theta / pot.angle_fullscale_rad * pot.v_supply;
  double v_adc = v_pot * pot.divider_ratio;
  if (pot.noise_sigma_v > 0.0 && rng != nullptr)
    v_adc += pot.noise_sigma_v * gaussian(*rng);
  const long code = std::lround(v_adc / pot.adc_ref_v * pot.max_code());
  r.code = static_cast<int>(std::clamp(code, 0L, long{pot.max_code()}));
  return r;
}

double JointPlant::step(double theta_rad, double duty_pct, double dt) const {
  return std::clamp(theta_rad + no_load_rate_rad_s * duty_pct / 100.0 * dt,
                    min_rad, max_rad);
}

FirmwareNode::FirmwareNode(std::uint8_t node, PotModel pot,
                           ControllerGains gains, bool peak_mode)
    : node_(node), role_(role_of(node)), pot_(pot), gains_(gains) {
  state_.peak_mode = peak_mode;
}

void FirmwareNode::on_frame(const can::CanFrame& frame) {
  const can::Decoded d = can::decode(frame);
  if (!d.ok() || d.kind != can::Decoded::Kind::Command || d.node != node_) {
    state_.nak_pending = true;
    return;
  }
  apply(d.command);
}

void FirmwareNode::apply(const can::Command& cmd) {
  state_ = handle_command(state_, cmd, role_).state;
}

void FirmwareNode::control_tick(double true_angle_rad, double dt,
                                std::mt19937_64& rng) {
  if (role_ != Role::JointDrive) return;
  state_.last_adc_code = pot_read(pot_, true_angle_rad, &rng).code;
  state_ = angle_controller_step(state_, measured_angle_rad(), dt, gains_);
}

can::Telemetry FirmwareNode::telemetry(double est_torque_Nm,
                                       double board_temp_C, bool slipping) {
  can::Telemetry tm;
  tm.node = node_;
  tm.angle_centideg =
      saturate_i16(measured_angle_rad() * 180.0 / std::numbers::pi * 100.0);
  tm.est_torque_mNm = saturate_i16(est_torque_Nm * 1000.0);
  tm.board_temp_deci_C = saturate_i16(board_temp_C * 10.0);
  std::uint8_t status = 0;
  if (slipping) status |= can::flags::kSlip;
  if (state_.mode == Mode::Estop) status |= can::flags::kEstop;
  if (state_.nak_pending) status |= can::flags::kNak;
  if (state_.peak_mode) status |= can::flags::kPeakMode;
  tm.status = status;
  state_.nak_pending = false;
  return tm;
}

}  // namespace inpipe::firmware
