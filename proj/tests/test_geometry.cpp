// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "error.hpp"
#include "geometry.hpp"

namespace inpipe::geometry {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Geometry, BendArclengthIsRadiusTimesAngle) {
  const auto b = PipeSegment::bend(0.1, kPi / 2, kBore3in, 0.5);
  EXPECT_NEAR(b.arclength(), 0.15707963, 1e-8);
}

TEST(Geometry, StraightAndIncreaserArclength) {
  EXPECT_DOUBLE_EQ(PipeSegment::straight(1.25, kBore4in, 0).arclength(), 1.25);
  EXPECT_DOUBLE_EQ(
      PipeSegment::increaser(0.1, kBore3in, kBore4in, 0).arclength(), 0.1);
}

TEST(Geometry, IncreaserDiameterIsLinear) {
  const std::vector<PipeSegment> segs = {
      PipeSegment::straight(0.4, kBore3in, 0),
      PipeSegment::increaser(0.1, kBore3in, kBore4in, 0),
      PipeSegment::straight(0.4, kBore4in, 0)};
  const auto net = build_network(segs);
  EXPECT_DOUBLE_EQ(net.diameter_at(0.2), 0.075);
  EXPECT_NEAR(net.diameter_at(0.45), 0.0875, 1e-12);
  EXPECT_DOUBLE_EQ(net.diameter_at(0.7), 0.100);
  EXPECT_NEAR(net.total_length(), 0.9, 1e-12);
}

TEST(Geometry, CurvatureOnlyInsideBends) {
  const std::vector<PipeSegment> segs = {
      PipeSegment::straight(0.3, kBore3in, 0),
      PipeSegment::bend(0.1, kPi / 2, kBore3in, 0.5),
      PipeSegment::straight(1.0, kBore3in, 1)};
  const auto net = build_network(segs);
  EXPECT_EQ(net.curvature_at(0.1), 0.0);
  EXPECT_DOUBLE_EQ(net.curvature_at(0.35), 10.0);
  EXPECT_EQ(net.curvature_at(1.0), 0.0);
  EXPECT_DOUBLE_EQ(net.gravity_axial_at(0.35), 0.5);
  EXPECT_DOUBLE_EQ(net.gravity_axial_at(1.0), 1.0);
}

TEST(Geometry, JunctionBelongsToNextSegment) {
  const std::vector<PipeSegment> segs = {
      PipeSegment::straight(0.5, kBore3in, 0),
      PipeSegment::straight(0.5, kBore3in, 1)};
  const auto net = build_network(segs);
  EXPECT_EQ(net.segment_index(0.5), 1u);
  EXPECT_EQ(net.segment_index(1.0), 1u);
  EXPECT_EQ(net.segment_index(0.0), 0u);
}

TEST(Geometry, OutOfRangeQueriesThrow) {
  const std::vector<PipeSegment> segs = {PipeSegment::straight(1, kBore3in, 0)};
  const auto net = build_network(segs);
  EXPECT_THROW(net.diameter_at(-1e-6), Error);
  EXPECT_THROW(net.diameter_at(1.0 + 1e-6), Error);
  EXPECT_NO_THROW(net.diameter_at(1.0));
}

TEST(Geometry, RejectsDiameterDiscontinuity) {
  const std::vector<PipeSegment> segs = {
      PipeSegment::straight(0.5, kBore3in, 0),
      PipeSegment::straight(0.5, kBore4in, 0)};
  try {
    build_network(segs);
    FAIL() << "expected a continuity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Geometry, RejectsBadSegments) {
  using V = std::vector<PipeSegment>;
  EXPECT_THROW(build_network(V{}), Error);
  EXPECT_THROW(build_network(V{PipeSegment::straight(0, kBore3in, 0)}), Error);
  EXPECT_THROW(build_network(V{PipeSegment::straight(1, 0.01, 0)}), Error);
  EXPECT_THROW(build_network(V{PipeSegment::straight(1, kBore3in, 1.5)}), Error);
  EXPECT_THROW(build_network(V{PipeSegment::bend(-0.1, 1, kBore3in, 0)}), Error);
}

// Total length equals the sum of segment arclengths, and offsets are the
// prefix sums.
TEST(GeometryProperty, TotalIsSumOfArclengths) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> len(0.05, 2.0);
  std::uniform_real_distribution<double> rad(0.06, 0.5);
  std::uniform_real_distribution<double> ang(0.1, kPi);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PipeSegment> segs;
    double d = kBore3in;
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
      switch (kind(rng)) {
        case 0: segs.push_back(PipeSegment::straight(len(rng), d, 0)); break;
        case 1: segs.push_back(PipeSegment::bend(rad(rng), ang(rng), d, 0.5)); break;
        default: {
          const double out = d == kBore3in ? kBore4in : kBore3in;
          segs.push_back(PipeSegment::increaser(len(rng), d, out, 0));
          d = out;
        }
      }
      sum += segs.back().arclength();
    }
    const auto net = build_network(segs);
    EXPECT_NEAR(net.total_length(), sum, 1e-12);
    double prefix = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_NEAR(net.offsets()[i], prefix, 1e-12);
      prefix += segs[i].arclength();
    }
  }
}

}  // namespace
}  // namespace inpipe::geometry
