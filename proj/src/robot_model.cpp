// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "geometry.hpp"

namespace inpipe::robot {

void RobotParams::validate() const {
  const double values[] = {link_joint_to_joint_m,    end_link_m,
                           wheel_radius_m,           total_mass_kg,
                           total_extended_length_m,  max_cont_joint_torque_Nm,
                           peak_joint_torque_Nm,     max_speed_m_s,
                           max_cont_traction_N,      peak_traction_N};
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument,
                  "robot parameters must be positive and finite");
  if (!(spring_stiffness_Nm_per_rad >= 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "spring stiffness must be non-negative");

  const double length = 2.0 * end_link_m + 2.0 * link_joint_to_joint_m +
                        2.0 * wheel_radius_m;
  if (std::abs(length - total_extended_length_m) > 1e-6)
    throw Error(ErrorCode::InvalidArgument,
                "link lengths sum to " + std::to_string(length) +
                    " m, expected total_extended_length_m = " +
                    std::to_string(total_extended_length_m));

  const double h_min = geometry::kBore3in - 2.0 * wheel_radius_m;
  if (!(h_min > 0.0) || h_min > link_joint_to_joint_m)
    throw Error(ErrorCode::InvalidArgument,
                "robot cannot brace in a 3-in (0.075 m) bore");
  if (peak_joint_torque_Nm < max_cont_joint_torque_Nm ||
      peak_traction_N < max_cont_traction_N)
    throw Error(ErrorCode::InvalidArgument,
                "peak ratings must not be below continuous ratings");
}

double bend_deflection(double link_length, double curvature) {
  const double half_chord = link_length * curvature / 2.0;
  if (half_chord > 1.0)
    throw Error(ErrorCode::OutOfRange, "bend too tight for link length");
  return 2.0 * std::asin(half_chord);
}

BracingConfig solve_configuration(const RobotParams& params, double diameter,
                                  double curvature) {
  const double lj = params.link_joint_to_joint_m;
  const double h = diameter - 2.0 * params.wheel_radius_m;
  if (h < 0.0)
    throw Error(ErrorCode::OutOfRange,
                "bore smaller than wheel diameter (h = " + std::to_string(h) +
                    " m)");
  if (h > lj)
    throw Error(ErrorCode::OutOfRange,
                "bore too large for links to span (h = " + std::to_string(h) +
                    " m > L_j)");
  if (curvature < 0.0)
    throw Error(ErrorCode::InvalidArgument, "curvature must be >= 0");

  BracingConfig cfg;
  cfg.clearance_m = h;
  cfg.phi_rad = std::asin(h / lj);
  cfg.bend_deflection_rad = bend_deflection(lj, curvature);
  cfg.theta_mid_rad = 2.0 * cfg.phi_rad + cfg.bend_deflection_rad;
  cfg.theta_front_rad = cfg.phi_rad + cfg.bend_deflection_rad;
  cfg.theta_rear_rad = cfg.theta_front_rad;
  // Spring preload keeps every wheel on the wall whenever the chain spans
  // the bore; at zero clearance the chain lies flat.
  cfg.in_contact.fill(h > 0.0);
  return cfg;
}

Advance advance_position(double s, double v_axial, double dt, double total) {
  if (!(dt > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double next = std::clamp(s + v_axial * dt, 0.0, total);
  return {next, next >= total};
}

}  // namespace inpipe::robot
