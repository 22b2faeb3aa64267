// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Dispersive-shift characterization on synthetic data: exact entangled
// Ramsey response to a scaled displacement drive, damped-fringe fits per
// drive amplitude, and closed-form extraction of the cross-Kerr strength
// chi and the amplitude-to-displacement scale factor s.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qsense/fit.hpp"
#include "qsense/types.hpp"

namespace qsense::calibration {

// Excited-state probability of the dispersive Ramsey sequence with a
// displaced oscillator: P_e = 1/2 + (1/2) e^{-a^2 (1 - cos chi t)} cos(a^2 sin chi t).
double exact_response(double alpha, double chi, double t);

// Short-time expansion: P_e ~ 1/2 + (1/2) e^{-(a chi t)^2 / 2} cos(a^2 chi t);
// Gaussian envelope coefficient a chi / sqrt(2), fringe frequency a^2 chi / 2 pi.
double taylor_response(double alpha, double chi, double t);

struct RamseySweep {
  RVec amplitudes_z;    // drive amplitudes in [0, 1]
  RVec times;           // delays, seconds (shared across amplitudes)
  Eigen::MatrixXd p_e;  // one row per amplitude
};

struct SyntheticSweepConfig {
  double chi = 2.0 * kPi * 13.8e3;  // rad/s
  double s = 24.2;                  // displacement per unit drive amplitude
  double t2 = 30e-6;                // fringe contrast decay
  RVec amplitudes_z;                // empty = 0.40 .. 0.70 in steps of 0.05
  double t_max = 1.8e-6;
  int n_times = 150;
  double noise = 0.0;  // additive Gaussian standard deviation on p_e
  std::uint64_t seed = 0;
};

// Exact response at alpha = s z with contrast multiplied by e^{-t/T2} and
// optional additive noise.
RamseySweep make_synthetic_sweep(const SyntheticSweepConfig& cfg);

struct FitResult {
  std::vector<fit::RamseyFitParams> per_amplitude;  // (A, A0, C, f, T2) rows
  double m1 = 0.0;  // decay-coefficient slope:   C = m1 z
  double m2 = 0.0;  // fringe-frequency curvature: f = f0 + m2 z^2
  double f0 = 0.0;
  double chi_est = 0.0;
  double s_est = 0.0;
};

// Per-amplitude damped-fringe fits followed by the linear/quadratic
// parameter trends and the closed-form extraction chi = m1^2 / (pi m2),
// s = sqrt(2) pi m2 / m1.  Throws InvalidSpec for sweeps smaller than
// 3 amplitudes x 20 delays and FitDiverged when a fringe fit fails.
FitResult fit_and_extract(const RamseySweep& sweep, double t2_init = 25e-6,
                          double residual_threshold = 0.5);

// Forward relations inverted by the extraction.
double forward_m1(double chi, double s);  // s chi / sqrt(2)
double forward_m2(double chi, double s);  // s^2 chi / (2 pi)

}  // namespace qsense::calibration
