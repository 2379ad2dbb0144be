// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace inpipe::calibration {

/// Distance between the outer drive wheels on the rig (2 L_j).
inline constexpr double kRigLeverM = 0.24;

/// Static equilibrium on the rig: torque = force * L / 2.
double tau_from_force(double force_N, double lever_m);
double force_from_tau(double tau_Nm, double lever_m);

struct CalibrationSample {
  double t_s = 0.0;
  double duty_pct = 0.0;
  double force_N = 0.0;
  double torque_Nm = 0.0;
};

/// Duty ramps 0 -> max -> 0; each level is sampled `samples_per_level`
/// times and the whole ramp is run `repeats` times.
struct SweepProtocol {
  double duty_step_pct = 0.2;
  double max_duty_pct = 100.0;
  int samples_per_level = 2;
  int repeats = 2;
  double sample_period_s = 0.05;

  void validate() const;
  /// Duty levels of a single up/down ramp.
  std::vector<double> levels() const;
  std::size_t sample_count() const;
};

/// Gear plateaus are modeled by flooring the true torque to a multiple of
/// `step_height_Nm`; the sensor adds uniform noise of half-width
/// `sensor_noise_Nm`.
struct StepwiseNoise {
  bool enabled = true;
  double step_height_Nm = 0.08;
  double sensor_noise_Nm = 0.01;
};

using TorqueFunction = std::function<double(double duty_pct)>;

/// Deterministic for a given seed.
std::vector<CalibrationSample> simulate_rig(const TorqueFunction& truth,
                                            const SweepProtocol& proto,
                                            const StepwiseNoise& noise,
                                            std::uint64_t seed,
                                            double lever_m = kRigLeverM);

struct QuarticFit {
  std::array<double, 5> coeffs{};  // ascending powers of duty %
  double rmse_Nm = 0.0;
  double max_abs_residual_Nm = 0.0;
  double duty_scale = 1.0;       // duty is divided by this before fitting
  double condition_estimate = 0.0;  // |R_11| / |R_55| of the scaled QR
  std::size_t sample_count = 0;
  std::size_t distinct_duties = 0;
};

/// Least-squares quartic in duty. Throws inpipe::Error when fewer than five
/// distinct duty values are present.
QuarticFit fit_quartic(std::span<const CalibrationSample> samples);

std::string samples_csv(std::span<const CalibrationSample> samples);
std::string fit_report(const QuarticFit& fit);

}  // namespace inpipe::calibration
