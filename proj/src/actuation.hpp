// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace inpipe::actuation {

/// Least-squares quartic of the duty sweep, ascending powers of duty %.
inline constexpr std::array<double, 5> kDutyTorqueQuartic = {
    -0.1178, 4.7894e-2, 7.6041e-4, -1.6902e-5, -7.7385e-8};

inline constexpr double kSaturationTorqueNm = 3.0;
inline constexpr double kGridStepPct = 0.2;
inline constexpr double kPeakJointTorqueNm = 12.32;

/// Measured (duty %, Nm) operating points used by the default map.
inline constexpr std::array<std::pair<double, double>, 6> kTorqueAnchors = {{
    {0.0, 0.0},
    {10.0, 0.42},
    {25.0, 1.32},
    {50.0, 2.55},
    {70.0, 3.0},
    {100.0, 3.0},
}};

enum class TorqueMapMode { Anchors, Polynomial };

std::string_view to_string(TorqueMapMode mode);
TorqueMapMode parse_torque_map_mode(std::string_view text);

/// Evaluates a polynomial given ascending coefficients.
double eval_polynomial(std::span<const double> ascending, double x);

/// Monotone duty -> joint torque map, zero at zero duty and saturated at
/// `saturation_torque()` from `saturation_onset()` on.
class TorqueMap {
 public:
  static TorqueMap anchors();
  static TorqueMap polynomial(
      std::span<const double, 5> ascending = kDutyTorqueQuartic);

  TorqueMapMode mode() const { return mode_; }
  const std::array<double, 5>& coefficients() const { return coeffs_; }
  double saturation_torque() const { return tau_sat_; }
  double saturation_onset() const { return sat_onset_; }
  /// Values at 0, 0.2, ..., 100 %.
  const std::vector<double>& grid() const { return grid_; }

  /// Throws inpipe::Error for R outside [0, 100].
  double torque(double duty_pct) const;
  double operator()(double duty_pct) const { return torque(duty_pct); }

  /// Unclamped quartic, for comparison against the shaped map.
  double raw_polynomial(double duty_pct) const;

 private:
  TorqueMap() = default;

  TorqueMapMode mode_ = TorqueMapMode::Anchors;
  std::array<double, 5> coeffs_ = kDutyTorqueQuartic;
  double tau_sat_ = kSaturationTorqueNm;
  double sat_onset_ = 70.0;
  std::vector<double> grid_;
};

/// Signed duty -> axial speed, linear up to `max_speed` at 100 %.
double duty_to_speed(double duty_pct, double max_speed = 0.088);

struct ThermalConstants {
  double ambient_C = 25.0;
  double soft_limit_C = 80.0;
  double heat_W_per_duty2 = 0.044;  // p0
  double r_th_C_per_W = 1.0;
  double c_th_J_per_C = 1298.4;  // tau_c / R_th

  double time_constant_s() const { return r_th_C_per_W * c_th_J_per_C; }
  double steady_state_C(double duty_pct) const {
    return ambient_C + heat_W_per_duty2 * duty_pct * duty_pct * r_th_C_per_W;
  }
  void validate() const;
};

struct ThermalState {
  double board_temp_C = 25.0;
  double ambient_C = 25.0;
  double time_above_soft_limit_s = 0.0;
  bool failed = false;

  static ThermalState at_ambient(const ThermalConstants& c) {
    return {c.ambient_C, c.ambient_C, 0.0, false};
  }
};

/// Explicit first-order step of the board temperature; `failed` latches at
/// the soft limit.
ThermalState thermal_step(const ThermalState& ts, double joint_duty_pct,
                          double dt, const ThermalConstants& c);

}  // namespace inpipe::actuation
