// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actuation.hpp"
#include "canbus.hpp"
#include "firmware.hpp"
#include "geometry.hpp"
#include "mechanics.hpp"
#include "scenario.hpp"

namespace inpipe {

inline constexpr std::int64_t kControlPeriodUs = 10'000;
inline constexpr std::int64_t kTelemetryPeriodUs = 100'000;

inline constexpr std::string_view kTelemetryCsvHeader =
    "t_s,s_m,D_m,theta_mid_deg,joint_duty,drive_duty,est_torque_Nm,"
    "slip_margin_N,slip_flag,board_temp_C,mode";

/// One telemetry tick. Values are stored already rounded to the precision
/// they are written with, so a parsed CSV reproduces them exactly.
struct TelemetryRow {
  double t_s = 0.0;
  double s_m = 0.0;
  double D_m = 0.0;
  double theta_mid_deg = 0.0;
  double joint_duty = 0.0;
  double drive_duty = 0.0;
  double est_torque_Nm = 0.0;
  double slip_margin_N = 0.0;
  bool slip_flag = false;
  double board_temp_C = 0.0;
  firmware::Mode mode = firmware::Mode::Idle;

  bool operator==(const TelemetryRow&) const = default;
};

/// Rounds every field to its CSV precision.
TelemetryRow quantized(TelemetryRow row);
std::string csv_line(const TelemetryRow& row);
std::string telemetry_csv(std::span<const TelemetryRow> rows);
std::vector<TelemetryRow> parse_telemetry_csv(std::string_view text);

enum class MissionResult { Running, Completed, SlippedOut, Overheated, Timeout };

std::string_view to_string(MissionResult r);
/// CLI exit code: 0 completed, 2 slipped_out, 3 overheated, 4 timeout.
int exit_code(MissionResult r);

struct OutcomeCriteria {
  double total_length_m = 0.0;
  double soft_limit_C = 80.0;
  double stall_window_s = 2.0;
  double max_time_s = 600.0;
  bool stop_on_stall = true;
};

struct MissionOutcome {
  MissionResult result = MissionResult::Running;
  double t_s = 0.0;
};

/// True when the robot was commanded to move for the whole window ending at
/// `rows.back()` and advanced less than 1 mm.
bool stall_detected(std::span<const TelemetryRow> rows, double window_s);

/// Verdict for the last row of `rows`, given all rows before it.
MissionResult evaluate_latest(std::span<const TelemetryRow> rows,
                              const OutcomeCriteria& c);

/// Offline checker: first terminal row of a complete log.
MissionOutcome classify(std::span<const TelemetryRow> rows,
                        const OutcomeCriteria& c);

/// Thread-safe hand-off from gateway clients to the simulation owner.
template <typename T>
class OrderedQueue {
 public:
  void push(T item) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  std::vector<T> drain() {
    std::lock_guard lock(mu_);
    std::vector<T> out(std::make_move_iterator(items_.begin()),
                       std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
};

struct SimOptions {
  bool stop_on_stall = true;
  bool record_frames = true;
};

/// Routes an operator action onto the boards that implement it.
std::vector<std::pair<std::uint8_t, can::Command>> route(const Action& action);

/// Fixed-step loop binding pipe, robot, boards and bus. Single owner; not
/// thread-safe.
class Simulation {
 public:
  explicit Simulation(Scenario scenario, SimOptions options = {});

  /// Queued for the start of the next step. This is the only way commands
  /// enter the simulation, scripted or live.
  void submit(const Action& action);

  void step();
  /// Steps until a terminal verdict and returns it.
  MissionOutcome run();

  bool finished() const { return outcome_.result != MissionResult::Running; }
  const MissionOutcome& outcome() const { return outcome_; }

  std::int64_t now_us() const { return now_us_; }
  double now_s() const { return static_cast<double>(now_us_) * 1e-6; }
  std::int64_t dt_us() const { return dt_us_; }

  const Scenario& scenario() const { return scenario_; }
  const geometry::PipeNetwork& network() const { return network_; }
  const actuation::TorqueMap& torque_map() const { return torque_map_; }
  const std::vector<TelemetryRow>& log() const { return log_; }
  const std::vector<std::string>& frame_log() const { return frame_log_; }
  const firmware::FirmwareNode& node(std::uint8_t id) const;
  const actuation::ThermalState& thermal() const { return thermal_; }
  const mechanics::MotionState& motion() const { return motion_; }
  double roll_angle_rad() const { return roll_angle_rad_; }
  /// Latest telemetry received by the host, per node.
  const std::array<std::optional<can::Telemetry>, can::kNodeCount>&
  host_telemetry() const {
    return host_telemetry_;
  }
  OutcomeCriteria criteria() const;

  /// Called after each telemetry row is appended.
  std::function<void(const TelemetryRow&)> on_row;

  std::string frame_log_text() const;

 private:
  void inject_due_actions();
  void dispatch(const can::Delivery& d);
  double true_theta_rad() const;
  double drive_duty() const;
  double roll_duty() const;
  double joint_duty() const;
  void telemetry_tick();

  Scenario scenario_;
  SimOptions options_;
  geometry::PipeNetwork network_;
  actuation::TorqueMap torque_map_;
  std::mt19937_64 rng_;
  can::CanBus bus_;
  std::vector<firmware::FirmwareNode> nodes_;
  std::array<std::optional<can::Telemetry>, can::kNodeCount> host_telemetry_{};

  mechanics::MotionState motion_;
  actuation::ThermalState thermal_;
  double roll_angle_rad_ = 0.0;

  std::int64_t now_us_ = 0;
  std::int64_t dt_us_ = 1000;
  std::size_t next_mission_step_ = 0;
  std::vector<Action> submitted_;

  std::vector<TelemetryRow> log_;
  std::vector<std::string> frame_log_;
  MissionOutcome outcome_;
};

}  // namespace inpipe
