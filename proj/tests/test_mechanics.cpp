// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "calibration.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "mechanics.hpp"
#include "robot_model.hpp"

namespace inpipe::mechanics {
namespace {

using geometry::PipeSegment;
using robot::RobotParams;

constexpr double kPi = std::numbers::pi;

robot::BracingConfig brace(double phi_deg) {
  robot::BracingConfig c;
  c.phi_rad = phi_deg * kPi / 180.0;
  c.theta_mid_rad = 2 * c.phi_rad;
  return c;
}

geometry::PipeNetwork single(const PipeSegment& seg) {
  const std::vector<PipeSegment> v{seg};
  return geometry::build_network(v);
}

TEST(Mechanics, ZeroTorqueZeroNormals) {
  const auto f = contact_forces(brace(22.0), 0.0, RobotParams{});
  EXPECT_EQ(f.total_normal(), 0.0);
}

TEST(Mechanics, NormalsAtTwentyFivePercent) {
  const auto f = contact_forces(brace(22.0), 1.32, RobotParams{});
  EXPECT_NEAR(f.n_outer_front_N, 11.86, 0.01);
  EXPECT_NEAR(f.n_outer_rear_N, 11.86, 0.01);
  EXPECT_NEAR(f.n_mid_N, 23.73, 0.01);
  EXPECT_DOUBLE_EQ(f.n_mid_N, f.n_outer_front_N + f.n_outer_rear_N);
}

TEST(Mechanics, ContactForceErrors) {
  EXPECT_THROW(contact_forces(brace(22.0), -0.1, RobotParams{}), Error);
  EXPECT_THROW(contact_forces(brace(95.0), 1.0, RobotParams{}), Error);
}

TEST(Mechanics, CapacityExamples) {
  const RobotParams p;
  const auto f = contact_forces(brace(22.0), 1.32, p);
  EXPECT_NEAR(traction_capacity(f, {0.4, 0, "dry"}, p), 18.98, 0.01);
  EXPECT_DOUBLE_EQ(traction_capacity(f, {1.5, 0, "x"}, p, false),
                   std::min(1.5 * f.total_normal(), 151.0));
  const auto big = contact_forces(brace(22.0), 100.0, p);
  EXPECT_DOUBLE_EQ(traction_capacity(big, {1.0, 0, "x"}, p), 151.0);
  EXPECT_DOUBLE_EQ(traction_capacity(big, {1.0, 0, "x"}, p, true), 728.0);
  EXPECT_EQ(traction_capacity(contact_forces(brace(22), 0, p), {1.0, 0, "x"}, p), 0.0);
}

TEST(Mechanics, RequiredForceExamples) {
  const RobotParams p;
  const Environment dry{0.4, 0.0, "dry"};
  const auto vertical = single(PipeSegment::straight(1, 0.075, 1.0));
  EXPECT_NEAR(required_force(0.5, +1, vertical, dry, p), 15.40, 0.005);
  const auto flat = single(PipeSegment::straight(1, 0.075, 0.0));
  EXPECT_EQ(required_force(0.5, +1, flat, dry, p), 0.0);

  const auto bend = single(PipeSegment::bend(0.1, kPi / 2, 0.075, 0.5));
  const double delta = 2 * std::asin(0.12 * 10 / 2);
  const double f_bend = 0.5 * (2 * delta) / 0.12;
  EXPECT_NEAR(f_bend, 10.7, 0.05);
  EXPECT_NEAR(required_force(0.05, +1, bend, dry, p),
              1.57 * 9.80665 * 0.5 + f_bend, 1e-12);
}

TEST(Mechanics, BackwardAndHoldRequiredForce) {
  const RobotParams p;
  const Environment env{0.3, 2.0, "sewage"};
  const auto vertical = single(PipeSegment::straight(1, 0.075, 1.0));
  const double w = 1.57 * 9.80665;
  EXPECT_NEAR(required_force(0.5, +1, vertical, env, p), w + 2.0, 1e-12);
  EXPECT_NEAR(required_force(0.5, -1, vertical, env, p), -w, 1e-12);
  EXPECT_NEAR(required_force(0.5, 0, vertical, env, p), w, 1e-12);
}

TEST(Mechanics, SlipExamplesAtSpecFriction) {
  const RobotParams p;
  const auto vertical = single(PipeSegment::straight(1, 0.075, 1.0));
  EnvironmentProfile dry(Environment{0.4, 0, "dry"});
  const MotionState start{0.1, false, false, {}};

  auto next = step_quasistatic(start, {0.42, 0.088, false}, vertical, dry, p, 0.001);
  EXPECT_TRUE(next.slipping);
  EXPECT_NEAR(next.forces.traction_capacity_N, 6.04, 0.01);
  EXPECT_EQ(next.s_m, start.s_m);

  next = step_quasistatic(start, {1.32, 0.088, false}, vertical, dry, p, 0.001);
  EXPECT_FALSE(next.slipping);
  EXPECT_NEAR(next.s_m, 0.1 + 0.088e-3, 1e-15);

  EnvironmentProfile sewage(Environment{0.2, 0, "sewage"});
  next = step_quasistatic(start, {1.32, 0.088, false}, vertical, sewage, p, 0.001);
  EXPECT_TRUE(next.slipping);
  EXPECT_NEAR(next.forces.traction_capacity_N, 9.49, 0.01);
  next = step_quasistatic(start, {2.55, 0.088, false}, vertical, sewage, p, 0.001);
  EXPECT_FALSE(next.slipping);
  EXPECT_NEAR(next.forces.traction_capacity_N, 18.33, 0.01);
}

TEST(Mechanics, EnvironmentProfileLaterRangesWin) {
  EnvironmentProfile prof(Environment{0.55, 0, "dry"});
  prof.add_range(1.0, 2.0, {0.3, 2, "sewage"});
  prof.add_range(1.5, 1.8, {0.1, 0, "oil"});
  EXPECT_EQ(prof.at(0.5).label, "dry");
  EXPECT_EQ(prof.at(1.2).label, "sewage");
  EXPECT_EQ(prof.at(1.6).label, "oil");
  EXPECT_THROW(prof.add_range(2.0, 1.0, {}), Error);
  EXPECT_THROW(prof.add_range(0, 1, {0.0, 0, "bad"}), Error);
}

TEST(MechanicsProperty, MarginMonotoneInTorqueAndFriction) {
  const RobotParams p;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double d = 0.05 + 0.09 * u(rng);
    const double incl = 2 * u(rng) - 1;
    const auto seg = u(rng) < 0.5 ? PipeSegment::straight(1, d, incl)
                                  : PipeSegment::bend(0.07 + u(rng), 1.0, d, incl);
    const auto net = single(seg);
    const double s = net.total_length() * u(rng);
    const int dir = static_cast<int>(u(rng) * 3) - 1;
    const double tau = 5 * u(rng);
    const double dtau = 2 * u(rng);
    const double mu = 0.01 + 1.2 * u(rng);
    const double dmu = (1.5 - mu) * u(rng);
    const bool peak = u(rng) < 0.2;
    const Environment env{mu, 3 * u(rng), "x"};
    Environment env_hi = env;
    env_hi.mu = mu + dmu;
    const double m0 = evaluate(s, tau, dir, net, env, p, peak).slip_margin_N;
    EXPECT_GE(evaluate(s, tau + dtau, dir, net, env, p, peak).slip_margin_N, m0);
    EXPECT_GE(evaluate(s, tau, dir, net, env_hi, p, peak).slip_margin_N, m0);
  }
}

TEST(MechanicsProperty, HomogeneousInTorque) {
  const RobotParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto c = brace(60 * u(rng));
    const double tau = 4 * u(rng);
    const double k = 10 * u(rng);
    const auto a = contact_forces(c, tau, p);
    const auto b = contact_forces(c, k * tau, p);
    EXPECT_NEAR(b.n_outer_front_N, k * a.n_outer_front_N, 1e-9);
    EXPECT_NEAR(b.n_mid_N, k * a.n_mid_N, 1e-9);
    EXPECT_NEAR(b.n_outer_rear_N, k * a.n_outer_rear_N, 1e-9);
  }
}

// Straight symmetric bracing is the torque rig: the outer wheel reads 2 tau / L
// with L the axial separation of the outer wheels.
TEST(MechanicsProperty, ConsistentWithRigStatics) {
  const RobotParams p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = 0.035 + 0.11 * u(rng);
    const auto c = robot::solve_configuration(p, d, 0.0);
    const double tau = 3 * u(rng);
    const double lever = 2 * p.link_joint_to_joint_m * std::cos(c.phi_rad);
    const auto f = contact_forces(c, tau, p);
    EXPECT_NEAR(f.n_outer_front_N, calibration::force_from_tau(tau, lever), 1e-12);
    EXPECT_NEAR(calibration::tau_from_force(f.n_outer_front_N, lever), tau, 1e-12);
  }
}

TEST(MechanicsProperty, FlatStraightAlwaysAdvances) {
  const RobotParams p;
  const auto net = single(PipeSegment::straight(1, 0.075, 0.0));
  const EnvironmentProfile env(Environment{0.05, 0, "x"});
  for (double tau : {1e-9, 1e-3, 0.5, 3.0}) {
    const auto next = step_quasistatic({0.2, false, false, {}}, {tau, 0.05, false},
                                       net, env, p, 0.01);
    EXPECT_FALSE(next.slipping);
    EXPECT_GT(next.s_m, 0.2);
  }
}

}  // namespace
}  // namespace inpipe::mechanics
