// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "actuation.hpp"
#include "error.hpp"

namespace inpipe::actuation {
namespace {

// Both pairings of the printed constants, evaluated longhand.
double ascending_reading(double r) {
  return -0.1178 + 4.7894e-2 * r + 7.6041e-4 * r * r - 1.6902e-5 * r * r * r -
         7.7385e-8 * r * r * r * r;
}
double descending_reading(double r) {
  return -0.1178 * r * r * r * r + 4.7894e-2 * r * r * r + 7.6041e-4 * r * r -
         1.6902e-5 * r - 7.7385e-8;
}

TEST(CoefficientOrder, OnlyAscendingMatchesAnchors) {
  const std::array<std::pair<double, double>, 2> anchors = {{{10, 0.42}, {25, 1.32}}};
  for (auto [r, tau] : anchors) {
    EXPECT_LT(std::abs(ascending_reading(r) - tau), 0.06) << "R=" << r;
    EXPECT_GT(std::abs(descending_reading(r) - tau), 1000.0) << "R=" << r;
  }
  EXPECT_NEAR(ascending_reading(50), 1.58, 0.01);
  EXPECT_LT(descending_reading(25), -40000.0);
}

TEST(TorqueMap, ShippedCoefficientsAreAscending) {
  const auto map = TorqueMap::polynomial();
  for (double r : {0.0, 10.0, 25.0, 50.0, 73.3})
    EXPECT_NEAR(map.raw_polynomial(r), ascending_reading(r), 1e-12);
}

TEST(TorqueMap, PolynomialExamples) {
  const auto map = TorqueMap::polynomial();
  EXPECT_NEAR(map.torque(10), 0.420, 0.005);
  EXPECT_EQ(map.torque(0), 0.0);
  EXPECT_DOUBLE_EQ(map.torque(85), 3.0);
  EXPECT_NEAR(map.saturation_onset(), 41.8, 1e-9);
  EXPECT_DOUBLE_EQ(map.torque(41.8), 3.0);
  EXPECT_LT(map.torque(41.6), 1.75);
}

TEST(TorqueMap, AnchorExamples) {
  const auto map = TorqueMap::anchors();
  EXPECT_DOUBLE_EQ(map.torque(10), 0.42);
  EXPECT_DOUBLE_EQ(map.torque(25), 1.32);
  EXPECT_DOUBLE_EQ(map.torque(50), 2.55);
  EXPECT_DOUBLE_EQ(map.torque(70), 3.0);
  EXPECT_DOUBLE_EQ(map.torque(100), 3.0);
  EXPECT_DOUBLE_EQ(map.torque(5), 0.21);
}

TEST(TorqueMap, RejectsOutOfRange) {
  const auto map = TorqueMap::anchors();
  EXPECT_THROW(map.torque(-0.1), Error);
  EXPECT_THROW(map.torque(100.1), Error);
  EXPECT_THROW(map.torque(NAN), Error);
  EXPECT_THROW(parse_torque_map_mode("cubic"), Error);
}

TEST(TorqueMapProperty, MonotoneBoundedZeroAtZero) {
  for (const auto& map : {TorqueMap::anchors(), TorqueMap::polynomial()}) {
    EXPECT_EQ(map.grid().size(), 501u);
    EXPECT_EQ(map.torque(0), 0.0);
    double prev = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double r = i * 1e-3;
      const double t = map.torque(r);
      EXPECT_GE(t, prev) << to_string(map.mode()) << " R=" << r;
      EXPECT_LE(t, 12.32);
      prev = t;
    }
    for (double r = map.saturation_onset(); r <= 100; r += 0.5)
      EXPECT_DOUBLE_EQ(map.torque(r), 3.0);
  }
}

TEST(Speed, Law) {
  EXPECT_DOUBLE_EQ(duty_to_speed(100), 0.088);
  EXPECT_EQ(duty_to_speed(0), 0.0);
  EXPECT_DOUBLE_EQ(duty_to_speed(-50), -0.044);
}

double crossing_time(double duty, double limit_s) {
  const ThermalConstants c;
  auto ts = ThermalState::at_ambient(c);
  const double dt = 1e-3;
  for (long i = 1; i <= static_cast<long>(limit_s / dt); ++i) {
    ts = thermal_step(ts, duty, dt, c);
    if (ts.failed) return i * dt;
  }
  return -1.0;
}

TEST(Thermal, HalfDutyCrossesSoftLimitAtNineHundredSeconds) {
  EXPECT_NEAR(crossing_time(50, 1200), 900.0, 1.0);
  const ThermalConstants c;
  EXPECT_NEAR(c.time_constant_s(), 900.0 / std::log(2.0), 0.1);
  EXPECT_DOUBLE_EQ(c.steady_state_C(50) - c.ambient_C, 110.0);
}

TEST(Thermal, QuarterDutyNeverFails) {
  EXPECT_LT(crossing_time(25, 3600), 0.0);
  EXPECT_DOUBLE_EQ(ThermalConstants{}.steady_state_C(25), 52.5);
}

TEST(Thermal, FailedLatches) {
  const ThermalConstants c;
  ThermalState ts{81.0, 25.0, 0.0, false};
  ts = thermal_step(ts, 0, 1.0, c);
  EXPECT_TRUE(ts.failed);
  for (int i = 0; i < 5000; ++i) ts = thermal_step(ts, 0, 1.0, c);
  EXPECT_LT(ts.board_temp_C, 80.0);
  EXPECT_TRUE(ts.failed);
  EXPECT_THROW(thermal_step(ts, 0, 0.0, c), Error);
}

TEST(ThermalProperty, MonotoneTowardSteadyState) {
  const ThermalConstants c;
  for (double duty : {0.0, 10.0, 25.0, 40.0, 50.0}) {
    const double target = c.steady_state_C(duty);
    for (double start : {25.0, 60.0, 120.0}) {
      ThermalState ts{start, 25.0, 0.0, false};
      double gap = std::abs(ts.board_temp_C - target);
      for (int i = 0; i < 2000; ++i) {
        ts = thermal_step(ts, duty, 1.0, c);
        const double g = std::abs(ts.board_temp_C - target);
        EXPECT_LE(g, gap + 1e-12);
        gap = g;
      }
    }
  }
}

TEST(ThermalProperty, CoolingDecaysStrictly) {
  const ThermalConstants c;
  ThermalState ts{70.0, 25.0, 0.0, false};
  double prev = ts.board_temp_C - 25.0;
  for (int i = 0; i < 3000; ++i) {
    ts = thermal_step(ts, 0, 1.0, c);
    const double excess = ts.board_temp_C - 25.0;
    EXPECT_LT(excess, prev);
    EXPECT_GT(excess, 0.0);
    prev = excess;
  }
}

}  // namespace
}  // namespace inpipe::actuation
