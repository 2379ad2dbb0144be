// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace inpipe::can {

inline constexpr std::uint16_t kCommandBase = 0x100;
inline constexpr std::uint16_t kTelemetryBase = 0x200;
inline constexpr std::uint16_t kMaxStandardId = 0x7FF;

/// Node assignment along the chain.
enum Node : std::uint8_t {
  kFrontRoll = 0,
  kJ1Drive = 1,
  kJ2JointDrive = 2,
  kJ3Drive = 3,
  kRearRoll = 4,
};
inline constexpr std::uint8_t kNodeCount = 5;

struct CanFrame {
  std::uint16_t id = 0;
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, 8> data{};

  bool operator==(const CanFrame& o) const;
  /// id < 2048 and dlc <= 8.
  bool valid() const { return id <= kMaxStandardId && dlc <= 8; }
};

enum class Opcode : std::uint8_t {
  Stop = 0x00,
  Drive = 0x01,
  Roll = 0x02,
  SetJointAngle = 0x03,
  SetJointDuty = 0x04,
  Estop = 0x05,
  ResetEstop = 0x06,
};
inline constexpr std::uint8_t kOpcodeCount = 7;

/// Decoded command. `operand` is the signed duty (Drive, Roll), the target
/// in centidegrees (SetJointAngle), or the unsigned duty (SetJointDuty).
struct Command {
  Opcode op = Opcode::Stop;
  std::int16_t operand = 0;

  static Command stop() { return {Opcode::Stop, 0}; }
  static Command drive(int duty) { return {Opcode::Drive, static_cast<std::int16_t>(duty)}; }
  static Command roll(int duty) { return {Opcode::Roll, static_cast<std::int16_t>(duty)}; }
  static Command set_joint_angle(int centideg) { return {Opcode::SetJointAngle, static_cast<std::int16_t>(centideg)}; }
  static Command set_joint_duty(int duty) { return {Opcode::SetJointDuty, static_cast<std::int16_t>(duty)}; }
  static Command estop() { return {Opcode::Estop, 0}; }
  static Command reset_estop() { return {Opcode::ResetEstop, 0}; }

  bool operator==(const Command&) const = default;
};

std::string_view to_string(Opcode op);

namespace flags {
inline constexpr std::uint8_t kSlip = 0x01;
inline constexpr std::uint8_t kEstop = 0x02;
inline constexpr std::uint8_t kNak = 0x04;
inline constexpr std::uint8_t kPeakMode = 0x08;
inline constexpr std::uint8_t kAll = 0x0F;
}  // namespace flags

struct Telemetry {
  std::uint8_t node = 0;
  std::int16_t angle_centideg = 0;
  std::int16_t est_torque_mNm = 0;
  std::int16_t board_temp_deci_C = 0;
  std::uint8_t status = 0;

  bool operator==(const Telemetry&) const = default;
};

enum class DecodeStatus {
  Ok,
  UnknownId,
  UnknownOpcode,
  DlcMismatch,
  OperandOutOfRange,
  NodeMismatch,
  ReservedFlags,
};

std::string_view to_string(DecodeStatus status);

struct Decoded {
  enum class Kind { Command, Telemetry };

  DecodeStatus status = DecodeStatus::Ok;
  Kind kind = Kind::Command;
  std::uint8_t node = 0;
  Command command;
  Telemetry telemetry;

  bool ok() const { return status == DecodeStatus::Ok; }
};

/// Throws inpipe::Error for operands outside their documented ranges.
CanFrame encode(const Command& cmd, std::uint8_t node);
CanFrame encode(const Telemetry& tm);

/// Never throws; every malformed frame maps to a distinct status.
Decoded decode(const CanFrame& frame);

/// Validates an operand for `op` without building a frame.
bool operand_in_range(Opcode op, int operand);

/// `t_s ID dlc payload` with the ID as three hex digits and the payload as
/// contiguous uppercase hex ("-" when empty).
std::string frame_log_line(double t_s, const CanFrame& frame);

struct BusConfig {
  std::int64_t latency_us = 1000;
  double loss_probability = 0.0;
  std::uint64_t seed = 0;
};

struct Delivery {
  std::int64_t t_us = 0;
  CanFrame frame;
};

/// Shared medium. Frames become deliverable `latency_us` after enqueue and
/// are delivered lowest ID first, then in enqueue order. Loss is decided at
/// enqueue from the bus's own seeded generator.
class CanBus {
 public:
  explicit CanBus(BusConfig config = {});

  /// Returns false when the frame was lost.
  bool enqueue(const CanFrame& frame);

  /// Advances the bus clock by dt and returns the frames due by then.
  std::vector<Delivery> step(std::int64_t dt_us);

  std::int64_t now_us() const { return now_us_; }
  std::size_t in_flight() const { return pending_.size(); }
  std::uint64_t enqueued() const { return enqueued_; }
  std::uint64_t dropped() const { return dropped_; }
  const BusConfig& config() const { return config_; }

 private:
  struct Pending {
    std::int64_t due_us;
    std::uint64_t seq;
    CanFrame frame;
  };

  BusConfig config_;
  std::mt19937_64 rng_;
  std::vector<Pending> pending_;
  std::int64_t now_us_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace inpipe::can
