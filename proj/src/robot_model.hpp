// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

namespace inpipe::robot {

inline constexpr double kGravity = 9.80665;

/// Physical constants of the articulated robot. Defaults satisfy the
/// extended-length identity and brace in a 3-in bore.
struct RobotParams {
  double link_joint_to_joint_m = 0.12;
  double end_link_m = 0.12;
  double wheel_radius_m = 0.015;
  double total_mass_kg = 1.57;
  double total_extended_length_m = 0.51;
  double spring_stiffness_Nm_per_rad = 0.5;
  double max_cont_joint_torque_Nm = 2.56;
  double peak_joint_torque_Nm = 12.32;
  double max_speed_m_s = 0.088;
  double max_cont_traction_N = 151.0;
  double peak_traction_N = 728.0;

  /// Throws inpipe::Error if the length identity or the 3-in bracing
  /// feasibility does not hold, or any value is non-positive.
  void validate() const;
};

/// Wheel order: front roll, J1 drive, J2 drive, J3 drive, rear roll.
inline constexpr std::size_t kWheelCount = 5;

struct BracingConfig {
  double theta_mid_rad = 0.0;
  double phi_rad = 0.0;
  double theta_front_rad = 0.0;
  double theta_rear_rad = 0.0;
  double bend_deflection_rad = 0.0;  // added to each joint inside a bend
  double clearance_m = 0.0;
  std::array<bool, kWheelCount> in_contact{};
};

/// Planar zigzag bracing in a bore of diameter D, with the chord-inscription
/// bend correction for nonzero curvature.
BracingConfig solve_configuration(const RobotParams& params, double diameter,
                                  double curvature);

/// Bend deflection of one joint: 2 asin(L_j k / 2).
double bend_deflection(double link_length, double curvature);

struct Advance {
  double s = 0.0;
  bool arrived = false;
};

/// Clamps s + v dt into [0, total]. `arrived` is set when the far end is
/// reached.
Advance advance_position(double s, double v_axial, double dt, double total);

}  // namespace inpipe::robot
