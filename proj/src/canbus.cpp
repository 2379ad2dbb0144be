// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "canbus.hpp"

#include <algorithm>
#include <cstdio>

#include "error.hpp"

namespace inpipe::can {
namespace {

void put_i16(std::uint8_t* p, std::int16_t v) {
  const auto u = static_cast<std::uint16_t>(v);
  p[0] = static_cast<std::uint8_t>(u & 0xFF);
  p[1] = static_cast<std::uint8_t>(u >> 8);
}

std::int16_t get_i16(const std::uint8_t* p) {
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0]) |
                                   static_cast<std::uint16_t>(p[1] << 8));
}

std::uint8_t command_dlc(Opcode op) {
  switch (op) {
    case Opcode::Drive:
    case Opcode::Roll:
    case Opcode::SetJointDuty:
      return 2;
    case Opcode::SetJointAngle:
      return 3;
    default:
      return 1;
  }
}

Decoded decode_command(const CanFrame& f) {
  Decoded d;
  d.kind = Decoded::Kind::Command;
  d.node = static_cast<std::uint8_t>(f.id - kCommandBase);
  if (f.dlc == 0) {
    d.status = DecodeStatus::DlcMismatch;
    return d;
  }
  if (f.data[0] >= kOpcodeCount) {
    d.status = DecodeStatus::UnknownOpcode;
    return d;
  }
  const auto op = static_cast<Opcode>(f.data[0]);
  if (f.dlc != command_dlc(op)) {
    d.status = DecodeStatus::DlcMismatch;
    return d;
  }
  int operand = 0;
  switch (op) {
    case Opcode::Drive:
    case Opcode::Roll:
      operand = static_cast<std::int8_t>(f.data[1]);
      break;
    case Opcode::SetJointDuty:
      operand = f.data[1];
      break;
    case Opcode::SetJointAngle:
      operand = get_i16(&f.data[1]);
      break;
    default:
      break;
  }
  if (!operand_in_range(op, operand)) {
    d.status = DecodeStatus::OperandOutOfRange;
    return d;
  }
  d.command = {op, static_cast<std::int16_t>(operand)};
  return d;
}

Decoded decode_telemetry(const CanFrame& f) {
  Decoded d;
  d.kind = Decoded::Kind::Telemetry;
  d.node = static_cast<std::uint8_t>(f.id - kTelemetryBase);
  if (f.dlc != 8) {
    d.status = DecodeStatus::DlcMismatch;
    return d;
  }
  if (f.data[0] != d.node) {
    d.status = DecodeStatus::NodeMismatch;
    return d;
  }
  if ((f.data[7] & ~flags::kAll) != 0) {
    d.status = DecodeStatus::ReservedFlags;
    return d;
  }
  d.telemetry.node = d.node;
  d.telemetry.angle_centideg = get_i16(&f.data[1]);
  d.telemetry.est_torque_mNm = get_i16(&f.data[3]);
  d.telemetry.board_temp_deci_C = get_i16(&f.data[5]);
  d.telemetry.status = f.data[7];
  return d;
}

}  // namespace

bool CanFrame::operator==(const CanFrame& o) const {
  return id == o.id && dlc == o.dlc &&
         std::equal(data.begin(), data.begin() + std::min<int>(dlc, 8),
                    o.data.begin());
}

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Stop: return "stop";
    case Opcode::Drive: return "drive";
    case Opcode::Roll: return "roll";
    case Opcode::SetJointAngle: return "set_joint_angle";
    case Opcode::SetJointDuty: return "set_joint_duty";
    case Opcode::Estop: return "estop";
    case Opcode::ResetEstop: return "reset_estop";
  }
  return "?";
}

std::string_view to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::Ok: return "ok";
    case DecodeStatus::UnknownId: return "unknown id";
    case DecodeStatus::UnknownOpcode: return "unknown opcode";
    case DecodeStatus::DlcMismatch: return "dlc mismatch";
    case DecodeStatus::OperandOutOfRange: return "operand out of range";
    case DecodeStatus::NodeMismatch: return "node mismatch";
    case DecodeStatus::ReservedFlags: return "reserved flag bits set";
  }
  return "?";
}

bool operand_in_range(Opcode op, int operand) {
  switch (op) {
    case Opcode::Drive:
    case Opcode::Roll:
      return operand >= -100 && operand <= 100;
    case Opcode::SetJointDuty:
      return operand >= 0 && operand <= 100;
    case Opcode::SetJointAngle:
      return operand >= INT16_MIN && operand <= INT16_MAX;
    default:
      return operand == 0;
  }
}

CanFrame encode(const Command& cmd, std::uint8_t node) {
  if (node >= kNodeCount)
    throw Error(ErrorCode::InvalidArgument,
                "node " + std::to_string(node) + " does not exist");
  if (static_cast<std::uint8_t>(cmd.op) >= kOpcodeCount)
    throw Error(ErrorCode::InvalidArgument, "unknown opcode");
  if (!operand_in_range(cmd.op, cmd.operand))
    throw Error(ErrorCode::OutOfRange,
                std::string(to_string(cmd.op)) + " operand " +
                    std::to_string(cmd.operand) + " out of range");
  CanFrame f;
  f.id = static_cast<std::uint16_t>(kCommandBase + node);
  f.dlc = command_dlc(cmd.op);
  f.data[0] = static_cast<std::uint8_t>(cmd.op);
  switch (cmd.op) {
    case Opcode::Drive:
    case Opcode::Roll:
      f.data[1] = static_cast<std::uint8_t>(static_cast<std::int8_t>(cmd.operand));
      break;
    case Opcode::SetJointDuty:
      f.data[1] = static_cast<std::uint8_t>(cmd.operand);
      break;
    case Opcode::SetJointAngle:
      put_i16(&f.data[1], cmd.operand);
      break;
    default:
      break;
  }
  return f;
}

CanFrame encode(const Telemetry& tm) {
  if (tm.node >= kNodeCount)
    throw Error(ErrorCode::InvalidArgument,
                "node " + std::to_string(tm.node) + " does not exist");
  if ((tm.status & ~flags::kAll) != 0)
    throw Error(ErrorCode::OutOfRange, "reserved telemetry flag bits set");
  CanFrame f;
  f.id = static_cast<std::uint16_t>(kTelemetryBase + tm.node);
  f.dlc = 8;
  f.data[0] = tm.node;
  put_i16(&f.data[1], tm.angle_centideg);
  put_i16(&f.data[3], tm.est_torque_mNm);
  put_i16(&f.data[5], tm.board_temp_deci_C);
  f.data[7] = tm.status;
  return f;
}

Decoded decode(const CanFrame& frame) {
  if (!frame.valid()) {
    Decoded d;
    d.status = frame.dlc > 8 ? DecodeStatus::DlcMismatch
                             : DecodeStatus::UnknownId;
    return d;
  }
  if (frame.id >= kCommandBase && frame.id < kCommandBase + kNodeCount)
    return decode_command(frame);
  if (frame.id >= kTelemetryBase && frame.id < kTelemetryBase + kNodeCount)
    return decode_telemetry(frame);
  Decoded d;
  d.status = DecodeStatus::UnknownId;
  return d;
}

std::string frame_log_line(double t_s, const CanFrame& frame) {
  char head[48];
  std::snprintf(head, sizeof head, "%.6f %03X %u ", t_s, frame.id,
                static_cast<unsigned>(frame.dlc));
  std::string line = head;
  if (frame.dlc == 0) {
    line += '-';
  } else {
    char byte[3];
    for (int i = 0; i < frame.dlc && i < 8; ++i) {
      std::snprintf(byte, sizeof byte, "%02X", frame.data[static_cast<std::size_t>(i)]);
      line += byte;
    }
  }
  return line;
}

CanBus::CanBus(BusConfig config) : config_(config), rng_(config.seed) {
  if (config_.latency_us < 0)
    throw Error(ErrorCode::InvalidArgument, "bus latency must be >= 0");
  if (!(config_.loss_probability >= 0.0 && config_.loss_probability <= 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "loss probability must be in [0, 1]");
}

bool CanBus::enqueue(const CanFrame& frame) {
  if (!frame.valid())
    throw Error(ErrorCode::InvalidArgument, "invalid CAN frame");
  ++enqueued_;
  if (config_.loss_probability > 0.0) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u < config_.loss_probability) {
      ++dropped_;
      return false;
    }
  }
  pending_.push_back({now_us_ + config_.latency_us, seq_++, frame});
  return true;
}

std::vector<Delivery> CanBus::step(std::int64_t dt_us) {
  if (dt_us <= 0)
    throw Error(ErrorCode::InvalidArgument, "bus step must be positive");
  now_us_ += dt_us;

  auto due_end = std::stable_partition(
      pending_.begin(), pending_.end(),
      [this](const Pending& p) { return p.due_us <= now_us_; });
  std::sort(pending_.begin(), due_end, [](const Pending& a, const Pending& b) {
    return a.frame.id != b.frame.id ? a.frame.id < b.frame.id : a.seq < b.seq;
  });

  std::vector<Delivery> out;
  out.reserve(static_cast<std::size_t>(due_end - pending_.begin()));
  for (auto it = pending_.begin(); it != due_end; ++it)
    out.push_back({now_us_, it->frame});
  pending_.erase(pending_.begin(), due_end);
  return out;
}

}  // namespace inpipe::can
