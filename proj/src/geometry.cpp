// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace inpipe::geometry {
namespace {

constexpr double kJunctionTolerance = 1e-9;

[[noreturn]] void fail(std::size_t index, const std::string& what) {
  throw Error(ErrorCode::InvalidArgument,
              "segment " + std::to_string(index) + ": " + what);
}

bool diameter_ok(double d) {
  return std::isfinite(d) && d >= kMinDiameter && d <= kMaxDiameter;
}

void validate(const PipeSegment& seg, std::size_t index) {
  if (!diameter_ok(seg.diameter_in_m) || !diameter_ok(seg.diameter_out_m))
    fail(index, "diameter outside [0.05, 0.15] m");
  if (!(seg.inclination >= -1.0 && seg.inclination <= 1.0))
    fail(index, "inclination outside [-1, 1]");

  switch (seg.kind) {
    case SegmentKind::Straight:
    case SegmentKind::Increaser:
      if (!(seg.length_m > 0.0) || !std::isfinite(seg.length_m))
        fail(index, "length must be positive");
      break;
    case SegmentKind::Bend:
      if (!(seg.bend_radius_m > 0.0) || !std::isfinite(seg.bend_radius_m))
        fail(index, "bend radius must be positive");
      if (!(seg.bend_angle_rad > 0.0) || !std::isfinite(seg.bend_angle_rad))
        fail(index, "bend angle must be positive");
      break;
  }

  const bool equal_ends = seg.diameter_in_m == seg.diameter_out_m;
  if (seg.kind == SegmentKind::Increaser && equal_ends)
    fail(index, "increaser needs different inlet and outlet diameters");
  if (seg.kind != SegmentKind::Increaser && !equal_ends)
    fail(index, "only an increaser may change diameter");
}

}  // namespace

PipeSegment PipeSegment::straight(double length, double diameter,
                                  double incl) {
  PipeSegment s;
  s.kind = SegmentKind::Straight;
  s.length_m = length;
  s.diameter_in_m = s.diameter_out_m = diameter;
  s.inclination = incl;
  return s;
}

PipeSegment PipeSegment::bend(double radius, double angle_rad,
                              double diameter, double incl) {
  PipeSegment s;
  s.kind = SegmentKind::Bend;
  s.bend_radius_m = radius;
  s.bend_angle_rad = angle_rad;
  s.diameter_in_m = s.diameter_out_m = diameter;
  s.inclination = incl;
  return s;
}

PipeSegment PipeSegment::increaser(double length, double d_in, double d_out,
                                   double incl) {
  PipeSegment s;
  s.kind = SegmentKind::Increaser;
  s.length_m = length;
  s.diameter_in_m = d_in;
  s.diameter_out_m = d_out;
  s.inclination = incl;
  return s;
}

double PipeSegment::arclength() const {
  return kind == SegmentKind::Bend ? bend_radius_m * bend_angle_rad
                                   : length_m;
}

PipeNetwork build_network(std::span<const PipeSegment> specs) {
  if (specs.empty())
    throw Error(ErrorCode::InvalidArgument, "pipe network has no segments");

  PipeNetwork net;
  net.segments_.reserve(specs.size());
  net.offsets_.reserve(specs.size());

  double offset = 0.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const PipeSegment& seg = specs[i];
    validate(seg, i);
    if (i > 0) {
      const double prev_out = specs[i - 1].diameter_out_m;
      if (std::abs(prev_out - seg.diameter_in_m) > kJunctionTolerance)
        fail(i, "diameter discontinuity at junction (" +
                    std::to_string(prev_out) + " m -> " +
                    std::to_string(seg.diameter_in_m) + " m)");
    }
    net.segments_.push_back(seg);
    net.offsets_.push_back(offset);
    offset += seg.arclength();
  }
  net.total_ = offset;
  return net;
}

void PipeNetwork::check_range(double s) const {
  if (!(s >= 0.0 && s <= total_))
    throw Error(ErrorCode::OutOfRange,
                "arclength " + std::to_string(s) + " outside [0, " +
                    std::to_string(total_) + "]");
}

std::size_t PipeNetwork::segment_index(double s) const {
  check_range(s);
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s);
  return static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
}

double PipeNetwork::diameter_at(double s) const {
  const std::size_t i = segment_index(s);
  const PipeSegment& seg = segments_[i];
  if (seg.kind != SegmentKind::Increaser) return seg.diameter_in_m;
  const double u = std::clamp((s - offsets_[i]) / seg.length_m, 0.0, 1.0);
  return seg.diameter_in_m + u * (seg.diameter_out_m - seg.diameter_in_m);
}

double PipeNetwork::curvature_at(double s) const {
  const PipeSegment& seg = segments_[segment_index(s)];
  return seg.kind == SegmentKind::Bend ? 1.0 / seg.bend_radius_m : 0.0;
}

double PipeNetwork::gravity_axial_at(double s) const {
  return segments_[segment_index(s)].inclination;
}

}  // namespace inpipe::geometry
