// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace inpipe::geometry {

/// Nominal bores for the two supported pipe sizes.
inline constexpr double kBore3in = 0.075;
inline constexpr double kBore4in = 0.100;
inline constexpr double kDefaultIncreaserLength = 0.10;
inline constexpr double kMinDiameter = 0.05;
inline constexpr double kMaxDiameter = 0.15;

enum class SegmentKind { Straight, Bend, Increaser };

/// One segment of a pipe course. `inclination` is the axial component of
/// the unit "up" vector along the direction of travel (+1 = straight up).
struct PipeSegment {
  SegmentKind kind = SegmentKind::Straight;
  double length_m = 0.0;        // Straight, Increaser
  double bend_radius_m = 0.0;   // Bend
  double bend_angle_rad = 0.0;  // Bend
  double diameter_in_m = 0.0;
  double diameter_out_m = 0.0;
  double inclination = 0.0;

  static PipeSegment straight(double length, double diameter, double incl);
  static PipeSegment bend(double radius, double angle_rad, double diameter,
                          double incl);
  static PipeSegment increaser(double length, double d_in, double d_out,
                               double incl);

  double arclength() const;
};

/// Immutable, validated pipe course parameterized by centerline arclength.
class PipeNetwork {
 public:
  const std::vector<PipeSegment>& segments() const { return segments_; }
  /// Start offset of each segment.
  const std::vector<double>& offsets() const { return offsets_; }
  double total_length() const { return total_; }

  /// Index of the segment containing s. Junction points belong to the
  /// following segment, except s == total which belongs to the last.
  std::size_t segment_index(double s) const;

  double diameter_at(double s) const;
  double curvature_at(double s) const;
  double gravity_axial_at(double s) const;

 private:
  friend PipeNetwork build_network(std::span<const PipeSegment> specs);

  void check_range(double s) const;

  std::vector<PipeSegment> segments_;
  std::vector<double> offsets_;
  double total_ = 0.0;
};

/// Validates each segment and the junctions, throws inpipe::Error on any
/// violation.
PipeNetwork build_network(std::span<const PipeSegment> specs);

}  // namespace inpipe::geometry
