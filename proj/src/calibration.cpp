// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "error.hpp"

namespace inpipe::calibration {

double tau_from_force(double force_N, double lever_m) {
  if (!(lever_m > 0.0))
    throw Error(ErrorCode::InvalidArgument, "lever length must be positive");
  return force_N * lever_m / 2.0;
}

double force_from_tau(double tau_Nm, double lever_m) {
  if (!(lever_m > 0.0))
    throw Error(ErrorCode::InvalidArgument, "lever length must be positive");
  return 2.0 * tau_Nm / lever_m;
}

void SweepProtocol::validate() const {
  if (!(duty_step_pct > 0.0) || !(max_duty_pct > 0.0) ||
      max_duty_pct > 100.0)
    throw Error(ErrorCode::InvalidArgument, "invalid duty sweep range");
  if (samples_per_level < 1 || repeats < 1)
    throw Error(ErrorCode::InvalidArgument,
                "samples per level and repeats must be >= 1");
  if (!(sample_period_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sample period must be positive");
}

std::vector<double> SweepProtocol::levels() const {
  const auto steps =
      static_cast<long>(std::llround(max_duty_pct / duty_step_pct));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * steps + 1));
  for (long i = 0; i <= steps; ++i)
    out.push_back(std::min(max_duty_pct, static_cast<double>(i) * duty_step_pct));
  for (long i = steps - 1; i >= 0; --i)
    out.push_back(static_cast<double>(i) * duty_step_pct);
  return out;
}

std::size_t SweepProtocol::sample_count() const {
  return levels().size() * static_cast<std::size_t>(samples_per_level) *
         static_cast<std::size_t>(repeats);
}

std::vector<CalibrationSample> simulate_rig(const TorqueFunction& truth,
                                            const SweepProtocol& proto,
                                            const StepwiseNoise& noise,
                                            std::uint64_t seed,
                                            double lever_m) {
  proto.validate();
  std::mt19937_64 rng(seed);
  // Map the raw 64-bit output directly; std distributions are not
  // reproducible across standard libraries.
  auto uniform_pm = [&rng](double half_width) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * half_width;
  };

  const std::vector<double> levels = proto.levels();
  std::vector<CalibrationSample> out;
  out.reserve(proto.sample_count());

  std::size_t index = 0;
  for (int pass = 0; pass < proto.repeats; ++pass) {
    for (double duty : levels) {
      for (int k = 0; k < proto.samples_per_level; ++k) {
        double tau = truth(duty);
        if (noise.enabled) {
          if (noise.step_height_Nm > 0.0)
            tau = std::floor(tau / noise.step_height_Nm) * noise.step_height_Nm;
          tau += uniform_pm(noise.sensor_noise_Nm);
        }
        CalibrationSample s;
        s.t_s = static_cast<double>(index++) * proto.sample_period_s;
        s.duty_pct = duty;
        s.force_N = force_from_tau(tau, lever_m);
        s.torque_Nm = tau_from_force(s.force_N, lever_m);
        out.push_back(s);
      }
    }
  }
  return out;
}

QuarticFit fit_quartic(std::span<const CalibrationSample> samples) {
  std::vector<double> duties;
  duties.reserve(samples.size());
  for (const auto& s : samples) duties.push_back(s.duty_pct);
  std::sort(duties.begin(), duties.end());
  const auto distinct = static_cast<std::size_t>(
      std::distance(duties.begin(), std::unique(duties.begin(), duties.end())));
  if (samples.size() < 5 || distinct < 5)
    throw Error(ErrorCode::InvalidArgument,
                "rank-deficient fit: need at least 5 distinct duty values, got " +
                    std::to_string(distinct));

  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::abs(s.duty_pct));

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 5);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = samples[static_cast<std::size_t>(i)].duty_pct / scale;
    double p = 1.0;
    for (int k = 0; k < 5; ++k, p *= x) a(i, k) = p;
    b(i) = samples[static_cast<std::size_t>(i)].torque_Nm;
  }
  const Eigen::VectorXd norms = a.colwise().norm().transpose();
  for (int k = 0; k < 5; ++k) a.col(k) /= norms(k);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 5)
    throw Error(ErrorCode::InvalidArgument, "rank-deficient design matrix");
  const Eigen::VectorXd y = qr.solve(b);

  QuarticFit fit;
  fit.duty_scale = scale;
  fit.sample_count = samples.size();
  fit.distinct_duties = distinct;
  const auto r_diag = qr.matrixR().diagonal().cwiseAbs();
  fit.condition_estimate = r_diag.maxCoeff() / r_diag.minCoeff();
  for (int k = 0; k < 5; ++k)
    fit.coeffs[static_cast<std::size_t>(k)] =
        y(k) / norms(k) / std::pow(scale, k);

  const Eigen::VectorXd residual = b - a * y;
  fit.rmse_Nm = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
  fit.max_abs_residual_Nm = residual.cwiseAbs().maxCoeff();
  return fit;
}

std::string samples_csv(std::span<const CalibrationSample> samples) {
  std::string out = "t_s,duty_pct,force_N,torque_Nm\n";
  char line[128];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%.3f,%.1f,%.9f,%.9f\n", s.t_s,
                  s.duty_pct, s.force_N, s.torque_Nm);
    out += line;
  }
  return out;
}

std::string fit_report(const QuarticFit& fit) {
  std::string out = "# quartic fit of torque_Nm vs duty_pct, ascending powers\n";
  char line[128];
  for (std::size_t k = 0; k < fit.coeffs.size(); ++k) {
    std::snprintf(line, sizeof line, "a%zu = %.9e\n", k, fit.coeffs[k]);
    out += line;
  }
  std::snprintf(line, sizeof line,
                "rmse_Nm = %.9e\nmax_abs_residual_Nm = %.9e\n", fit.rmse_Nm,
                fit.max_abs_residual_Nm);
  out += line;
  std::snprintf(line, sizeof line,
                "samples = %zu\ndistinct_duties = %zu\nduty_scale = %.9e\n"
                "condition_estimate = %.9e\n",
                fit.sample_count, fit.distinct_duties, fit.duty_scale,
                fit.condition_estimate);
  out += line;
  return out;
}

}  // namespace inpipe::calibration
