// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/fit.hpp"

#include <algorithm>
#include <cmath>

namespace qsense::fit {

LmResult levenberg_marquardt(
    const std::function<void(const RVec&, RVec&, Eigen::MatrixXd*)>& fn, RVec init,
    const LmOptions& opts) {
  LmResult res;
  RVec p = std::move(init);
  const int n = static_cast<int>(p.size());

  RVec r;
  Eigen::MatrixXd jac;
  fn(p, r, &jac);
  double cost = r.squaredNorm();
  double lambda = opts.lambda0;

  // Per-parameter column scales.  Parameters routinely differ by many
  // orders of magnitude (offsets near one, rates near 1e6, times near
  // 1e-6), and the unscaled normal equations are numerically singular in
  // double precision.  Scales only ever grow, following MINPACK.
  RVec scale = RVec::Zero(n);
  const auto update_scale = [&]() {
    for (int i = 0; i < n; ++i)
      scale[i] = std::max({scale[i], jac.col(i).norm(), 1e-300});
  };
  update_scale();

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const Eigen::MatrixXd js = jac * scale.cwiseInverse().asDiagonal();
    const RVec g = js.transpose() * r;  // gradient in scaled variables
    if (g.cwiseAbs().maxCoeff() < opts.grad_tol * std::sqrt(cost + 1e-300)) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd damped = js.transpose() * js;
    for (int i = 0; i < n; ++i) damped(i, i) += lambda;
    const RVec delta = scale.cwiseInverse().cwiseProduct(damped.ldlt().solve(-g));
    if (!delta.allFinite()) {
      lambda *= 4.0;
      if (lambda > 1e12) break;
      continue;
    }
    const RVec trial = p + delta;
    RVec r_trial;
    fn(trial, r_trial, nullptr);
    const double cost_trial = r_trial.squaredNorm();
    if (cost_trial < cost) {
      bool small_step = true;
      for (int i = 0; i < n; ++i)
        if (std::abs(delta[i]) > opts.step_tol * (std::abs(p[i]) + opts.step_tol))
          small_step = false;
      p = trial;
      fn(p, r, &jac);
      update_scale();
      cost = r.squaredNorm();
      lambda = std::max(lambda * 0.5, 1e-14);
      if (small_step) {
        res.converged = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
  }
  res.params = p;
  res.residual_norm = std::sqrt(cost);
  return res;
}

namespace {

// Power of y at trial frequency f over samples (x, y), after mean removal.
double periodogram_power(const RVec& x, const RVec& y, double f, double mean) {
  double cs = 0.0, ss = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double w = 2.0 * kPi * f * x[i];
    cs += (y[i] - mean) * std::cos(w);
    ss += (y[i] - mean) * std::sin(w);
  }
  return cs * cs + ss * ss;
}

// Peak frequency over the DFT-style grid k / (N dx), k = 1 .. N/2.
double periodogram_peak(const RVec& x, const RVec& y) {
  const int n = static_cast<int>(x.size());
  const double span = x[n - 1] - x[0];
  if (span <= 0.0) throw InvalidSpec("samples must span a nonzero interval");
  const double mean = y.mean();
  double best_f = 1.0 / span, best_p = -1.0;
  // Double-resolution scan for a sharper starting point.
  for (int k = 1; k <= n; ++k) {
    const double f = 0.5 * k / span;
    const double p = periodogram_power(x, y, f, mean);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

RamseyFitParams fit_ramsey(const RVec& times, const RVec& p, double t2_init,
                           double residual_threshold) {
  const int n = static_cast<int>(times.size());
  if (n < 8 || p.size() != n) throw InvalidSpec("need at least 8 aligned samples");

  const double a_init = p.mean();
  const double a0_init = p.maxCoeff() - a_init;
  const double f_init = periodogram_peak(times, p);

  // Crude decay estimate from the upper envelope of |p - A| on a rolling
  // window of about one fringe period.
  double c_init = 0.0;
  {
    const double period = 1.0 / f_init;
    std::vector<double> ts, es;
    for (int i = 0; i < n; ++i) {
      double env = 0.0;
      for (int j = 0; j < n; ++j)
        if (std::abs(times[j] - times[i]) <= 0.5 * period)
          env = std::max(env, std::abs(p[j] - a_init));
      if (env > 1e-6 && std::abs(a0_init) > 1e-9 && env < std::abs(a0_init)) {
        ts.push_back(times[i]);
        es.push_back(-std::log(env / std::abs(a0_init)) - times[i] / t2_init);
      }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double u = ts[i] * ts[i];
      num += u * es[i];
      den += u * u;
    }
    if (den > 0.0) c_init = std::sqrt(std::max(num / den, 0.0));
  }

  // The exponential decay is optimized as a rate gamma = 1 / t2: the t2
  // axis has a singular barrier at zero that splits the parameter line in
  // two, while the rate is smooth there and lets the optimizer cross from
  // (numerically) undamped iterates back to finite lifetimes.
  const auto model = [&](const RVec& q, RVec& r, Eigen::MatrixXd* jac) {
    const double a = q[0], a0 = q[1], c = q[2], f = q[3], gamma = q[4];
    r.resize(n);
    if (jac) jac->resize(n, 5);
    for (int i = 0; i < n; ++i) {
      const double t = times[i];
      const double env = std::exp(-(c * t) * (c * t));
      const double dec = std::exp(-gamma * t);
      const double ph = 2.0 * kPi * f * t;
      const double cosph = std::cos(ph);
      r[i] = a + a0 * env * cosph * dec - p[i];
      if (jac) {
        (*jac)(i, 0) = 1.0;
        (*jac)(i, 1) = env * cosph * dec;
        (*jac)(i, 2) = a0 * env * (-2.0 * c * t * t) * cosph * dec;
        (*jac)(i, 3) = a0 * env * (-std::sin(ph)) * 2.0 * kPi * t * dec;
        (*jac)(i, 4) = a0 * env * cosph * dec * (-t);
      }
    }
  };

  RVec init(5);
  init << a_init, a0_init, c_init, f_init, 1.0 / t2_init;
  const LmResult lm = levenberg_marquardt(model, init);
  const double rms = lm.residual_norm / std::sqrt(static_cast<double>(n));
  if (!lm.params.allFinite() || rms > residual_threshold)
    throw FitDiverged("Ramsey fringe fit diverged (rms residual " + std::to_string(rms) + ")");

  RamseyFitParams out;
  out.a = lm.params[0];
  out.a0 = lm.params[1];
  out.c = std::abs(lm.params[2]);  // model depends on c^2 only
  out.f = std::abs(lm.params[3]);
  out.t2 = 1.0 / lm.params[4];
  out.residual_norm = lm.residual_norm;
  return out;
}

SinusoidFit fit_sinusoid(const RVec& x, const RVec& y) {
  const int n = static_cast<int>(x.size());
  if (n < 4 || y.size() != n) throw InvalidSpec("need at least 4 aligned samples");
  const double f0 = periodogram_peak(x, y);

  // Linear phase/amplitude estimate at the periodogram frequency.
  Eigen::MatrixXd basis(n, 3);
  for (int i = 0; i < n; ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = std::cos(2.0 * kPi * f0 * x[i]);
    basis(i, 2) = std::sin(2.0 * kPi * f0 * x[i]);
  }
  const Eigen::Vector3d coef =
      (basis.transpose() * basis).ldlt().solve(basis.transpose() * y);
  RVec init(4);
  init << coef[0], std::hypot(coef[1], coef[2]), f0, std::atan2(-coef[2], coef[1]);

  const auto model = [&](const RVec& q, RVec& r, Eigen::MatrixXd* jac) {
    const double a0 = q[0], a1 = q[1], f = q[2], ph0 = q[3];
    r.resize(n);
    if (jac) jac->resize(n, 4);
    for (int i = 0; i < n; ++i) {
      const double w = 2.0 * kPi * f * x[i] + ph0;
      r[i] = a0 + a1 * std::cos(w) - y[i];
      if (jac) {
        (*jac)(i, 0) = 1.0;
        (*jac)(i, 1) = std::cos(w);
        (*jac)(i, 2) = -a1 * std::sin(w) * 2.0 * kPi * x[i];
        (*jac)(i, 3) = -a1 * std::sin(w);
      }
    }
  };
  const LmResult lm = levenberg_marquardt(model, init);

  SinusoidFit out;
  out.a0 = lm.params[0];
  out.a1 = lm.params[1];
  out.f = lm.params[2];
  out.phase = lm.params[3];
  out.residual_norm = lm.residual_norm;
  if (out.a1 < 0.0) {
    out.a1 = -out.a1;
    out.phase += kPi;
  }
  if (out.f < 0.0) {
    out.f = -out.f;
    out.phase = -out.phase;
  }
  out.phase = std::remainder(out.phase, 2.0 * kPi);
  return out;
}

double fit_slope_through_origin(const RVec& x, const RVec& y) {
  const double den = x.squaredNorm();
  if (den <= 0.0) throw InvalidSpec("degenerate abscissae");
  return x.dot(y) / den;
}

void fit_offset_quadratic(const RVec& x, const RVec& y, double* c0, double* c2) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != n) throw InvalidSpec("need at least 2 aligned samples");
  double s0 = n, s2 = 0.0, s4 = 0.0, sy = 0.0, s2y = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = x[i] * x[i];
    s2 += u;
    s4 += u * u;
    sy += y[i];
    s2y += u * y[i];
  }
  const double det = s0 * s4 - s2 * s2;
  if (std::abs(det) < 1e-300) throw InvalidSpec("degenerate quadratic fit");
  if (c0) *c0 = (s4 * sy - s2 * s2y) / det;
  if (c2) *c2 = (s0 * s2y - s2 * sy) / det;
}

}  // namespace qsense::fit
