// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "error.hpp"

namespace inpipe {
namespace {

constexpr double kStallDistanceM = 1e-3;
constexpr double kTimeEps = 1e-9;

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0.000" in the CSV
}

std::uint64_t bus_seed(std::mt19937_64& rng) { return rng(); }

firmware::Mode parse_mode(std::string_view text) {
  using firmware::Mode;
  for (Mode m : {Mode::Idle, Mode::Drive, Mode::Roll, Mode::HoldAngle,
                 Mode::Estop})
    if (firmware::to_string(m) == text) return m;
  throw Error(ErrorCode::Parse, "unknown mode '" + std::string(text) + "'");
}

}  // namespace

TelemetryRow quantized(TelemetryRow r) {
  r.t_s = round_to(r.t_s, 3);
  r.s_m = round_to(r.s_m, 6);
  r.D_m = round_to(r.D_m, 6);
  r.theta_mid_deg = round_to(r.theta_mid_deg, 3);
  r.joint_duty = round_to(r.joint_duty, 3);
  r.drive_duty = round_to(r.drive_duty, 3);
  r.est_torque_Nm = round_to(r.est_torque_Nm, 4);
  r.slip_margin_N = round_to(r.slip_margin_N, 4);
  r.board_temp_C = round_to(r.board_temp_C, 3);
  return r;
}

std::string csv_line(const TelemetryRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%.3f,%.6f,%.6f,%.3f,%.3f,%.3f,%.4f,%.4f,%d,%.3f,%s", r.t_s,
                r.s_m, r.D_m, r.theta_mid_deg, r.joint_duty, r.drive_duty,
                r.est_torque_Nm, r.slip_margin_N, r.slip_flag ? 1 : 0,
                r.board_temp_C, firmware::to_string(r.mode).data());
  return buf;
}

std::string telemetry_csv(std::span<const TelemetryRow> rows) {
  std::string out(kTelemetryCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += csv_line(r);
    out += '\n';
  }
  return out;
}

std::vector<TelemetryRow> parse_telemetry_csv(std::string_view text) {
  std::vector<TelemetryRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kTelemetryCsvHeader)
        throw Error(ErrorCode::Parse, "telemetry CSV header mismatch");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 11)
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": expected 11 fields");
    auto num = [&](std::size_t i) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
      if (ec != std::errc() || p != f[i].data() + f[i].size())
        throw Error(ErrorCode::Parse,
                    "line " + std::to_string(line_no) + ": bad number");
      return v;
    };
    TelemetryRow r;
    r.t_s = num(0);
    r.s_m = num(1);
    r.D_m = num(2);
    r.theta_mid_deg = num(3);
    r.joint_duty = num(4);
    r.drive_duty = num(5);
    r.est_torque_Nm = num(6);
    r.slip_margin_N = num(7);
    r.slip_flag = num(8) != 0.0;
    r.board_temp_C = num(9);
    r.mode = parse_mode(f[10]);
    rows.push_back(r);
  }
  return rows;
}

std::string_view to_string(MissionResult r) {
  switch (r) {
    case MissionResult::Running: return "running";
    case MissionResult::Completed: return "completed";
    case MissionResult::SlippedOut: return "slipped_out";
    case MissionResult::Overheated: return "overheated";
    case MissionResult::Timeout: return "timeout";
  }
  return "?";
}

int exit_code(MissionResult r) {
  switch (r) {
    case MissionResult::Completed: return 0;
    case MissionResult::SlippedOut: return 2;
    case MissionResult::Overheated: return 3;
    case MissionResult::Timeout: return 4;
    case MissionResult::Running: return 1;
  }
  return 1;
}

bool stall_detected(std::span<const TelemetryRow> rows, double window_s) {
  if (rows.empty()) return false;
  const TelemetryRow& last = rows.back();
  const double start_t = last.t_s - window_s;
  if (start_t < -kTimeEps) return false;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->drive_duty == 0.0) return false;
    if (it->t_s <= start_t + kTimeEps)
      return std::abs(last.s_m - it->s_m) < kStallDistanceM;
  }
  return false;
}

MissionResult evaluate_latest(std::span<const TelemetryRow> rows,
                              const OutcomeCriteria& c) {
  if (rows.empty()) return MissionResult::Running;
  const TelemetryRow& r = rows.back();
  if (r.board_temp_C >= c.soft_limit_C) return MissionResult::Overheated;
  if (r.s_m >= c.total_length_m - 1e-6) return MissionResult::Completed;
  if (c.stop_on_stall && stall_detected(rows, c.stall_window_s))
    return MissionResult::SlippedOut;
  if (r.t_s >= c.max_time_s - kTimeEps) return MissionResult::Timeout;
  return MissionResult::Running;
}

MissionOutcome classify(std::span<const TelemetryRow> rows,
                        const OutcomeCriteria& c) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto verdict = evaluate_latest(rows.first(i + 1), c);
    if (verdict != MissionResult::Running) return {verdict, rows[i].t_s};
  }
  return {MissionResult::Running, rows.empty() ? 0.0 : rows.back().t_s};
}

std::vector<std::pair<std::uint8_t, can::Command>> route(const Action& a) {
  using can::Command;
  std::vector<std::pair<std::uint8_t, Command>> out;
  const int value = static_cast<int>(std::lround(a.value));
  auto all = [&out](Command c) {
    for (std::uint8_t n = 0; n < can::kNodeCount; ++n) out.emplace_back(n, c);
  };
  switch (a.kind) {
    case ActionKind::Stop: all(Command::stop()); break;
    case ActionKind::Estop: all(Command::estop()); break;
    case ActionKind::ResetEstop: all(Command::reset_estop()); break;
    case ActionKind::Drive:
      for (std::uint8_t n : {can::kJ1Drive, can::kJ2JointDrive, can::kJ3Drive})
        out.emplace_back(n, Command::drive(value));
      break;
    case ActionKind::Roll:
      for (std::uint8_t n : {can::kFrontRoll, can::kRearRoll})
        out.emplace_back(n, Command::roll(value));
      break;
    case ActionKind::JointDuty:
      out.emplace_back(can::kJ2JointDrive, Command::set_joint_duty(value));
      break;
    case ActionKind::JointAngle:
      out.emplace_back(can::kJ2JointDrive,
                       Command::set_joint_angle(static_cast<int>(
                           std::lround(a.value * 100.0))));
      break;
  }
  return out;
}

Simulation::Simulation(Scenario scenario, SimOptions options)
    : scenario_(std::move(scenario)),
      options_(options),
      network_(geometry::build_network(scenario_.pipe)),
      torque_map_(scenario_.torque_map == actuation::TorqueMapMode::Anchors
                      ? actuation::TorqueMap::anchors()
                      : actuation::TorqueMap::polynomial()),
      rng_(scenario_.seed),
      bus_(can::BusConfig{
          static_cast<std::int64_t>(std::llround(scenario_.bus_latency_s * 1e6)),
          scenario_.bus_loss, bus_seed(rng_)}) {
  scenario_.validate();
  dt_us_ = static_cast<std::int64_t>(std::llround(scenario_.dt_s * 1e6));
  if (dt_us_ <= 0 || kControlPeriodUs % dt_us_ != 0)
    throw Error(ErrorCode::InvalidArgument,
                "dt must divide the 10 ms control tick");

  for (std::uint8_t n = 0; n < can::kNodeCount; ++n)
    nodes_.emplace_back(n, scenario_.pot, scenario_.gains, scenario_.peak_mode);
  if (scenario_.peak_mode)
    std::fprintf(stderr,
                 "warning: peak mode enabled, joint duty cap raised to 100 %%\n");

  thermal_ = actuation::ThermalState::at_ambient(scenario_.thermal);
  motion_.s_m = 0.0;
  motion_.forces = mechanics::evaluate(0.0, 0.0, 0, network_,
                                       scenario_.env.at(0.0), scenario_.robot,
                                       scenario_.peak_mode);
  motion_.slipping = motion_.forces.slip_margin_N < 0.0;

  // Boards sample the pot once at power-up.
  for (auto& node : nodes_) node.control_tick(true_theta_rad(), 0.0, rng_);
  telemetry_tick();
}

const firmware::FirmwareNode& Simulation::node(std::uint8_t id) const {
  if (id >= nodes_.size())
    throw Error(ErrorCode::OutOfRange, "no such node");
  return nodes_[id];
}

OutcomeCriteria Simulation::criteria() const {
  return {network_.total_length(), scenario_.thermal.soft_limit_C,
          scenario_.stall_window_s, scenario_.max_time_s,
          options_.stop_on_stall};
}

void Simulation::submit(const Action& action) {
  validate(action);
  submitted_.push_back(action);
}

void Simulation::inject_due_actions() {
  const double now = now_s();
  const auto& mission = scenario_.mission;
  std::vector<Action> due;
  while (next_mission_step_ < mission.size() &&
         mission[next_mission_step_].t_s <= now + kTimeEps)
    due.push_back(mission[next_mission_step_++].action);
  due.insert(due.end(), submitted_.begin(), submitted_.end());
  submitted_.clear();

  for (const Action& a : due)
    for (const auto& [node, cmd] : route(a)) bus_.enqueue(can::encode(cmd, node));
}

void Simulation::dispatch(const can::Delivery& d) {
  if (options_.record_frames)
    frame_log_.push_back(
        can::frame_log_line(static_cast<double>(d.t_us) * 1e-6, d.frame));
  const can::Decoded dec = can::decode(d.frame);
  if (d.frame.id >= can::kCommandBase && d.frame.id < can::kTelemetryBase) {
    const auto node = static_cast<std::uint8_t>(d.frame.id - can::kCommandBase);
    if (node < nodes_.size()) nodes_[node].on_frame(d.frame);
    return;
  }
  if (dec.ok() && dec.kind == can::Decoded::Kind::Telemetry &&
      dec.node < host_telemetry_.size())
    host_telemetry_[dec.node] = dec.telemetry;
}

double Simulation::true_theta_rad() const {
  const double s = motion_.s_m;
  return robot::solve_configuration(scenario_.robot, network_.diameter_at(s),
                                    network_.curvature_at(s))
      .theta_mid_rad;
}

double Simulation::drive_duty() const {
  double sum = 0.0;
  for (std::uint8_t n : {can::kJ1Drive, can::kJ2JointDrive, can::kJ3Drive})
    sum += firmware::outputs(nodes_[n].state()).drive_duty_pct;
  return sum / 3.0;
}

double Simulation::roll_duty() const {
  return (firmware::outputs(nodes_[can::kFrontRoll].state()).roll_duty_pct +
          firmware::outputs(nodes_[can::kRearRoll].state()).roll_duty_pct) /
         2.0;
}

double Simulation::joint_duty() const {
  return firmware::outputs(nodes_[can::kJ2JointDrive].state()).joint_duty_pct;
}

void Simulation::step() {
  if (finished()) return;
  const double dt = static_cast<double>(dt_us_) * 1e-6;

  inject_due_actions();
  for (const auto& d : bus_.step(dt_us_)) dispatch(d);
  now_us_ += dt_us_;

  if (now_us_ % kControlPeriodUs == 0) {
    const double theta = true_theta_rad();
    for (auto& node : nodes_)
      node.control_tick(theta, static_cast<double>(kControlPeriodUs) * 1e-6,
                        rng_);
  }

  const double joint = joint_duty();
  mechanics::MotionCommand cmd;
  cmd.joint_torque_Nm = torque_map_.torque(std::clamp(joint, 0.0, 100.0));
  cmd.axial_speed_m_s =
      actuation::duty_to_speed(drive_duty(), scenario_.robot.max_speed_m_s);
  cmd.peak_mode = scenario_.peak_mode;
  motion_ = mechanics::step_quasistatic(motion_, cmd, network_, scenario_.env,
                                        scenario_.robot, dt);
  thermal_ = actuation::thermal_step(thermal_, std::abs(joint), dt,
                                     scenario_.thermal);

  // Roll is bookkeeping only: wheel surface speed over the bore radius.
  const double radius = network_.diameter_at(motion_.s_m) / 2.0;
  roll_angle_rad_ +=
      actuation::duty_to_speed(roll_duty(), scenario_.robot.max_speed_m_s) /
      radius * dt;

  if (now_us_ % kTelemetryPeriodUs == 0) telemetry_tick();
}

void Simulation::telemetry_tick() {
  const double joint = joint_duty();
  const double est = torque_map_.torque(std::clamp(joint, 0.0, 100.0));
  for (auto& node : nodes_)
    bus_.enqueue(can::encode(
        node.telemetry(est, thermal_.board_temp_C, motion_.slipping)));

  const auto& j2 = nodes_[can::kJ2JointDrive];
  TelemetryRow row;
  row.t_s = now_s();
  row.s_m = motion_.s_m;
  row.D_m = network_.diameter_at(motion_.s_m);
  row.theta_mid_deg = j2.measured_angle_rad() * 180.0 / std::numbers::pi;
  row.joint_duty = joint;
  row.drive_duty = drive_duty();
  row.est_torque_Nm = est;
  row.slip_margin_N = motion_.forces.slip_margin_N;
  row.slip_flag = motion_.slipping;
  row.board_temp_C = thermal_.board_temp_C;
  row.mode = j2.state().mode;
  log_.push_back(quantized(row));

  const MissionResult verdict = evaluate_latest(log_, criteria());
  if (verdict != MissionResult::Running) outcome_ = {verdict, log_.back().t_s};
  if (on_row) on_row(log_.back());
}

MissionOutcome Simulation::run() {
  while (!finished()) step();
  return outcome_;
}

std::string Simulation::frame_log_text() const {
  std::string out;
  for (const auto& line : frame_log_) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace inpipe
