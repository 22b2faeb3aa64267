// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/calibration.hpp"

#include <cmath>

#include "qsense/rng.hpp"

namespace qsense::calibration {

double exact_response(double alpha, double chi, double t) {
  const double a2 = alpha * alpha;
  const double env = std::exp(-a2 * (1.0 - std::cos(chi * t)));
  return 0.5 + 0.5 * env * std::cos(a2 * std::sin(chi * t));
}

double taylor_response(double alpha, double chi, double t) {
  const double act = alpha * chi * t;
  return 0.5 + 0.5 * std::exp(-0.5 * act * act) * std::cos(alpha * alpha * chi * t);
}

RamseySweep make_synthetic_sweep(const SyntheticSweepConfig& cfg) {
  if (cfg.n_times < 2 || cfg.t_max <= 0.0) throw InvalidSpec("bad sweep time grid");
  RamseySweep sweep;
  sweep.amplitudes_z = cfg.amplitudes_z;
  if (sweep.amplitudes_z.size() == 0) {
    sweep.amplitudes_z.resize(7);
    for (int i = 0; i < 7; ++i) sweep.amplitudes_z[i] = 0.40 + 0.05 * i;
  }
  sweep.times.resize(cfg.n_times);
  for (int j = 0; j < cfg.n_times; ++j)
    sweep.times[j] = cfg.t_max * (j + 1) / cfg.n_times;

  rng::Engine eng(cfg.seed);
  sweep.p_e.resize(sweep.amplitudes_z.size(), cfg.n_times);
  for (int i = 0; i < sweep.amplitudes_z.size(); ++i) {
    const double alpha = cfg.s * sweep.amplitudes_z[i];
    for (int j = 0; j < cfg.n_times; ++j) {
      const double t = sweep.times[j];
      const double contrast = exact_response(alpha, cfg.chi, t) - 0.5;
      double p = 0.5 + contrast * std::exp(-t / cfg.t2);
      if (cfg.noise > 0.0) p += cfg.noise * eng.normal();
      sweep.p_e(i, j) = p;
    }
  }
  return sweep;
}

FitResult fit_and_extract(const RamseySweep& sweep, double t2_init,
                          double residual_threshold) {
  const int n_amp = static_cast<int>(sweep.amplitudes_z.size());
  const int n_time = static_cast<int>(sweep.times.size());
  if (n_amp < 3) throw InvalidSpec("need at least 3 drive amplitudes");
  if (n_time < 20) throw InvalidSpec("need at least 20 delay points");
  if (sweep.p_e.rows() != n_amp || sweep.p_e.cols() != n_time)
    throw InvalidSpec("probability matrix does not match the sweep axes");

  FitResult res;
  res.per_amplitude.reserve(static_cast<std::size_t>(n_amp));
  RVec cs(n_amp), fs(n_amp);
  for (int i = 0; i < n_amp; ++i) {
    const RVec row = sweep.p_e.row(i).transpose();
    const fit::RamseyFitParams fp =
        fit::fit_ramsey(sweep.times, row, t2_init, residual_threshold);
    res.per_amplitude.push_back(fp);
    cs[i] = fp.c;
    fs[i] = fp.f;
  }

  res.m1 = fit::fit_slope_through_origin(sweep.amplitudes_z, cs);
  fit::fit_offset_quadratic(sweep.amplitudes_z, fs, &res.f0, &res.m2);
  res.chi_est = res.m1 * res.m1 / (kPi * res.m2);
  res.s_est = std::sqrt(2.0) * kPi * res.m2 / res.m1;
  return res;
}

double forward_m1(double chi, double s) { return s * chi / std::sqrt(2.0); }

double forward_m2(double chi, double s) { return s * s * chi / (2.0 * kPi); }

}  // namespace qsense::calibration
