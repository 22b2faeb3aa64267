// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Small nonlinear least-squares toolbox: Levenberg-Marquardt with analytic
// Jacobians, a damped-cosine Ramsey-fringe fit, and a plain sinusoid fit
// with periodogram initialisation.

#pragma once

#include <functional>

#include <Eigen/Dense>

#include "qsense/types.hpp"

namespace qsense::fit {

struct LmOptions {
  int max_iterations = 400;
  double lambda0 = 1e-3;
  double step_tol = 1e-14;     // stop when the relative step is this small
  double grad_tol = 1e-14;     // or the gradient max-norm is
};

struct LmResult {
  RVec params;
  double residual_norm = 0.0;  // sqrt(sum r^2)
  int iterations = 0;
  bool converged = false;
};

// Minimise |r(p)|^2.  `fn` fills the residual vector and, when the Jacobian
// pointer is non-null, the m x n Jacobian dr/dp.  Marquardt scaling: the
// damping term multiplies diag(J^T J).
LmResult levenberg_marquardt(
    const std::function<void(const RVec&, RVec&, Eigen::MatrixXd*)>& fn, RVec init,
    const LmOptions& opts = {});

// Ramsey fringe model P(t) = A + A0 exp(-(C t)^2) cos(2 pi f t) exp(-t/T2).
struct RamseyFitParams {
  double a = 0.0;
  double a0 = 0.0;
  double c = 0.0;
  double f = 0.0;
  double t2 = 0.0;
  double residual_norm = 0.0;
};

// Fit the five-parameter model to samples (times, p).  Initialisation:
// A = mean, A0 = max - mean, f from the periodogram peak, C from the
// log-envelope slope, T2 from `t2_init`.  Throws FitDiverged when the
// optimiser fails or the residual stays above `residual_threshold`.
RamseyFitParams fit_ramsey(const RVec& times, const RVec& p, double t2_init,
                           double residual_threshold = 0.5);

// y = a0 + a1 cos(2 pi f x + phase); a1 >= 0 in the result.
struct SinusoidFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double f = 0.0;
  double phase = 0.0;
  double residual_norm = 0.0;
};

SinusoidFit fit_sinusoid(const RVec& x, const RVec& y);

// Least squares y = m x through the origin.
double fit_slope_through_origin(const RVec& x, const RVec& y);

// Least squares y = c0 + c2 x^2.
void fit_offset_quadratic(const RVec& x, const RVec& y, double* c0, double* c2);

}  // namespace qsense::fit
