// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mechanics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace inpipe::mechanics {

void Environment::validate() const {
  if (!(mu > 0.0 && mu <= 1.5))
    throw Error(ErrorCode::InvalidArgument, "mu must be in (0, 1.5]");
  if (!(cable_drag_N >= 0.0) || !std::isfinite(cable_drag_N))
    throw Error(ErrorCode::InvalidArgument, "cable drag must be >= 0");
}

void EnvironmentProfile::set_base(Environment env) {
  env.validate();
  base_ = std::move(env);
}

void EnvironmentProfile::add_range(double from_m, double to_m,
                                   Environment env) {
  env.validate();
  if (!(from_m >= 0.0 && to_m > from_m))
    throw Error(ErrorCode::InvalidArgument,
                "environment range needs 0 <= from < to");
  ranges_.push_back({from_m, to_m, std::move(env)});
}

const Environment& EnvironmentProfile::at(double s) const {
  for (auto it = ranges_.rbegin(); it != ranges_.rend(); ++it)
    if (s >= it->from_m && s <= it->to_m) return it->env;
  return base_;
}

ContactForces contact_forces(const robot::BracingConfig& config,
                             double tau_mid,
                             const robot::RobotParams& params) {
  if (!(tau_mid >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "joint torque must be >= 0");
  const double cos_phi = std::cos(config.phi_rad);
  if (!(cos_phi > 0.0))
    throw Error(ErrorCode::OutOfRange, "unphysical bracing (cos phi <= 0)");

  const double arm = params.link_joint_to_joint_m * cos_phi;
  ContactForces f;
  f.n_outer_front_N = tau_mid / arm;
  f.n_outer_rear_N = tau_mid / arm;
  f.n_mid_N = f.n_outer_front_N + f.n_outer_rear_N;
  return f;
}

double traction_capacity(const ContactForces& forces, const Environment& env,
                         const robot::RobotParams& params, bool peak_mode) {
  const double ceiling =
      peak_mode ? params.peak_traction_N : params.max_cont_traction_N;
  return std::min(env.mu * forces.total_normal(), ceiling);
}

double bend_resistance(double curvature, const robot::RobotParams& params) {
  if (curvature <= 0.0) return 0.0;
  const double lj = params.link_joint_to_joint_m;
  const double delta = robot::bend_deflection(lj, curvature);
  return params.spring_stiffness_Nm_per_rad * (2.0 * delta) / lj;
}

double required_force(double s, int direction,
                      const geometry::PipeNetwork& net, const Environment& env,
                      const robot::RobotParams& params) {
  const double weight = params.total_mass_kg * robot::kGravity;
  const double incl = net.gravity_axial_at(s);
  if (direction == 0) return weight * std::abs(incl);

  const double dir = direction > 0 ? 1.0 : -1.0;
  // The tether trails behind, so it only resists forward travel.
  const double cable = direction > 0 ? env.cable_drag_N : 0.0;
  return dir * weight * incl + cable +
         bend_resistance(net.curvature_at(s), params);
}

ContactForces evaluate(double s, double tau_mid, int direction,
                       const geometry::PipeNetwork& net,
                       const Environment& env,
                       const robot::RobotParams& params, bool peak_mode) {
  const auto config =
      robot::solve_configuration(params, net.diameter_at(s), 0.0);
  ContactForces f = contact_forces(config, tau_mid, params);
  f.traction_capacity_N = traction_capacity(f, env, params, peak_mode);
  f.required_force_N = required_force(s, direction, net, env, params);
  f.slip_margin_N = f.traction_capacity_N - f.required_force_N;
  return f;
}

MotionState step_quasistatic(const MotionState& state,
                             const MotionCommand& cmd,
                             const geometry::PipeNetwork& net,
                             const EnvironmentProfile& env,
                             const robot::RobotParams& params, double dt) {
  const double v = cmd.axial_speed_m_s;
  const int direction = (v > 0.0) - (v < 0.0);
  const double tau = std::max(0.0, cmd.joint_torque_Nm);

  MotionState next = state;
  next.forces = evaluate(state.s_m, tau, direction, net, env.at(state.s_m),
                         params, cmd.peak_mode);
  next.slipping = next.forces.slip_margin_N < 0.0;
  if (!next.slipping && direction != 0) {
    const auto adv = robot::advance_position(state.s_m, v, dt,
                                             net.total_length());
    next.s_m = adv.s;
    next.arrived = adv.arrived;
  } else {
    next.arrived = state.s_m >= net.total_length();
  }
  return next;
}

}  // namespace inpipe::mechanics
