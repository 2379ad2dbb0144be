// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "actuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace inpipe::actuation {
namespace {

constexpr std::size_t kGridPoints = 501;  // 0..100 % in 0.2 % steps
constexpr double kRawPeakSearchLimitPct = 70.0;

double grid_duty(std::size_t i) { return static_cast<double>(i) * kGridStepPct; }

double interpolate_anchors(double duty) {
  for (std::size_t i = 1; i < kTorqueAnchors.size(); ++i) {
    const auto [x0, y0] = kTorqueAnchors[i - 1];
    const auto [x1, y1] = kTorqueAnchors[i];
    if (duty <= x1) return y0 + (duty - x0) * (y1 - y0) / (x1 - x0);
  }
  return kTorqueAnchors.back().second;
}

}  // namespace

std::string_view to_string(TorqueMapMode mode) {
  return mode == TorqueMapMode::Anchors ? "anchors" : "poly";
}

TorqueMapMode parse_torque_map_mode(std::string_view text) {
  if (text == "anchors") return TorqueMapMode::Anchors;
  if (text == "poly" || text == "polynomial") return TorqueMapMode::Polynomial;
  throw Error(ErrorCode::InvalidArgument,
              "unknown torque map mode '" + std::string(text) + "'");
}

double eval_polynomial(std::span<const double> ascending, double x) {
  double acc = 0.0;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it)
    acc = acc * x + *it;
  return acc;
}

TorqueMap TorqueMap::anchors() {
  TorqueMap map;
  map.mode_ = TorqueMapMode::Anchors;
  map.tau_sat_ = kSaturationTorqueNm;
  map.sat_onset_ = 70.0;
  map.grid_.resize(kGridPoints);
  for (std::size_t i = 0; i < kGridPoints; ++i)
    map.grid_[i] = interpolate_anchors(grid_duty(i));
  return map;
}

TorqueMap TorqueMap::polynomial(std::span<const double, 5> ascending) {
  TorqueMap map;
  map.mode_ = TorqueMapMode::Polynomial;
  std::copy(ascending.begin(), ascending.end(), map.coeffs_.begin());
  map.tau_sat_ = kSaturationTorqueNm;

  // Onset: the grid point where the raw quartic peaks on [0, 70] (last one
  // on ties). Beyond it the fit turns down, which the rig never showed.
  std::size_t onset = 0;
  double peak = -INFINITY;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double duty = grid_duty(i);
    if (duty > kRawPeakSearchLimitPct + 1e-9) break;
    const double v = eval_polynomial(map.coeffs_, duty);
    if (v >= peak) {
      peak = v;
      onset = i;
    }
  }
  map.sat_onset_ = grid_duty(onset);

  map.grid_.resize(kGridPoints);
  double running = 0.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    if (i >= onset) {
      map.grid_[i] = map.tau_sat_;
      continue;
    }
    const double v = std::max(0.0, eval_polynomial(map.coeffs_, grid_duty(i)));
    running = std::min(std::max(running, v), kPeakJointTorqueNm);
    map.grid_[i] = running;
  }
  map.grid_[0] = 0.0;
  return map;
}

double TorqueMap::raw_polynomial(double duty_pct) const {
  return eval_polynomial(coeffs_, duty_pct);
}

double TorqueMap::torque(double duty_pct) const {
  if (!(duty_pct >= 0.0 && duty_pct <= 100.0))
    throw Error(ErrorCode::OutOfRange,
                "duty " + std::to_string(duty_pct) + " % outside [0, 100]");
  if (mode_ == TorqueMapMode::Anchors) return interpolate_anchors(duty_pct);
  if (duty_pct >= sat_onset_ - 1e-9) return tau_sat_;

  const double pos = duty_pct / kGridStepPct;
  const auto i = std::min(static_cast<std::size_t>(pos), kGridPoints - 2);
  const double frac = pos - static_cast<double>(i);
  return grid_[i] + frac * (grid_[i + 1] - grid_[i]);
}

double duty_to_speed(double duty_pct, double max_speed) {
  return max_speed * std::clamp(duty_pct, -100.0, 100.0) / 100.0;
}

void ThermalConstants::validate() const {
  if (!(r_th_C_per_W > 0.0 && c_th_J_per_C > 0.0 && heat_W_per_duty2 >= 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "thermal constants must be positive");
  if (!(soft_limit_C > ambient_C))
    throw Error(ErrorCode::InvalidArgument,
                "soft limit must be above ambient");
}

ThermalState thermal_step(const ThermalState& ts, double joint_duty_pct,
                          double dt, const ThermalConstants& c) {
  if (!(dt > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double heat = c.heat_W_per_duty2 * joint_duty_pct * joint_duty_pct;
  const double loss = (ts.board_temp_C - ts.ambient_C) / c.r_th_C_per_W;

  ThermalState next = ts;
  next.board_temp_C = ts.board_temp_C + dt * (heat - loss) / c.c_th_J_per_C;
  if (next.board_temp_C >= c.soft_limit_C) {
    next.failed = true;
    next.time_above_soft_limit_s += dt;
  }
  return next;
}

}  // namespace inpipe::actuation
