// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"
#include "robot_model.hpp"

namespace inpipe::mechanics {

/// Tuned so the dry lab courses pass at 25 % joint duty and slip at 10 %,
/// and the sewage course slips at 25 % and passes at 50 %.
inline constexpr double kMuDry = 0.55;
inline constexpr double kMuSewage = 0.30;
inline constexpr double kFieldCableDragN = 2.0;

struct Environment {
  double mu = kMuDry;
  double cable_drag_N = 0.0;
  std::string label = "dry";

  void validate() const;
};

/// Piecewise environment over arclength. Later ranges override earlier
/// ones; arclengths not covered by any range use `base`.
class EnvironmentProfile {
 public:
  struct Range {
    double from_m;
    double to_m;
    Environment env;
  };

  EnvironmentProfile() = default;
  explicit EnvironmentProfile(Environment base) : base_(std::move(base)) {}

  void set_base(Environment env);
  void add_range(double from_m, double to_m, Environment env);

  const Environment& base() const { return base_; }
  const std::vector<Range>& ranges() const { return ranges_; }
  const Environment& at(double s) const;

 private:
  Environment base_;
  std::vector<Range> ranges_;
};

struct ContactForces {
  double n_outer_front_N = 0.0;
  double n_mid_N = 0.0;
  double n_outer_rear_N = 0.0;
  double traction_capacity_N = 0.0;
  double required_force_N = 0.0;
  double slip_margin_N = 0.0;

  double total_normal() const {
    return n_outer_front_N + n_mid_N + n_outer_rear_N;
  }
};

/// Wall normals from the middle-joint torque. The outer drive wheels react
/// the torque at moment arm L_j cos(phi); the middle wheel carries both.
ContactForces contact_forces(const robot::BracingConfig& config,
                             double tau_mid, const robot::RobotParams& params);

/// min(mu * sum of normals, motor traction ceiling).
double traction_capacity(const ContactForces& forces, const Environment& env,
                         const robot::RobotParams& params,
                         bool peak_mode = false);

/// Spring drag of the two passive joints inside a bend.
double bend_resistance(double curvature, const robot::RobotParams& params);

/// Axial force the drive wheels must transmit at s. `direction` is the sign
/// of the commanded axial speed; 0 means holding position.
double required_force(double s, int direction,
                      const geometry::PipeNetwork& net, const Environment& env,
                      const robot::RobotParams& params);

/// Full force balance at s: normals, capacity, requirement and margin.
ContactForces evaluate(double s, double tau_mid, int direction,
                       const geometry::PipeNetwork& net,
                       const Environment& env,
                       const robot::RobotParams& params, bool peak_mode);

struct MotionState {
  double s_m = 0.0;
  bool slipping = false;
  bool arrived = false;
  ContactForces forces;
};

struct MotionCommand {
  double joint_torque_Nm = 0.0;  // bracing torque, >= 0
  double axial_speed_m_s = 0.0;  // commanded, signed
  bool peak_mode = false;
};

/// Advances at the commanded speed when the slip margin is non-negative,
/// otherwise the wheels slip and s is unchanged.
MotionState step_quasistatic(const MotionState& state,
                             const MotionCommand& cmd,
                             const geometry::PipeNetwork& net,
                             const EnvironmentProfile& env,
                             const robot::RobotParams& params, double dt);

}  // namespace inpipe::mechanics
