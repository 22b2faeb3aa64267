// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "qsense/calibration.hpp"
#include "qsense/fit.hpp"
#include "qsense/rng.hpp"
#include "qsense/types.hpp"

using namespace qsense;

TEST_SUITE("calibration") {

TEST_CASE("exact response limits") {
  const double chi = 2.0 * kPi * 13.8e3;
  CHECK(calibration::exact_response(2.0, chi, 0.0) == 1.0);
  CHECK(calibration::exact_response(0.0, chi, 0.7e-6) == 1.0);
  // Probabilities stay in range for moderately large arguments.
  for (double t : {0.2e-6, 0.9e-6, 1.7e-6}) {
    const double p = calibration::exact_response(15.0, chi, t);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("exact response reproduces the Fock-space Ramsey sequence") {
  const double chi = 2.0 * kPi * 13.8e3;
  for (double alpha : {1.0, 2.0, 3.0}) {
    for (double t : {0.3e-6, 0.8e-6, 1.5e-6}) {
      const double closed = calibration::exact_response(alpha, chi, t);
      const double fock = oracle::ramsey_fock_probability(alpha, chi, t, 60);
      CHECK(closed == doctest::Approx(fock).epsilon(1e-3));
      CHECK(std::abs(closed - fock) < 1e-3);
    }
  }
}

TEST_CASE("short-time expansion approaches the exact response") {
  const double alpha = 3.0;
  CHECK(calibration::taylor_response(0.0, 1.0, 0.5) == 1.0);
  // chi t = 0.01: the two expressions agree to fourth order.
  CHECK(calibration::taylor_response(alpha, 1.0, 0.01) ==
        doctest::Approx(calibration::exact_response(alpha, 1.0, 0.01)).epsilon(1e-4));
  // Sup-norm difference over t in [0, T] shrinks as T does.
  double prev = 1.0;
  for (double t_max : {0.2, 0.05, 0.0125}) {
    double sup = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double t = t_max * i / 40.0;
      sup = std::max(sup, std::abs(calibration::taylor_response(alpha, 1.0, t) -
                                   calibration::exact_response(alpha, 1.0, t)));
    }
    CHECK(sup < prev);
    prev = sup;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("taylor envelope decays with the advertised Gaussian coefficient") {
  // P_taylor - 1/2 = (1/2) e^{-(a chi t)^2 / 2} cos(a^2 chi t): at the fringe
  // maxima cos = 1 and the log of the contrast is -(a chi / sqrt(2))^2 t^2.
  // The exponent at the k-th maximum is 2 pi^2 k^2 / alpha^2; alpha is
  // chosen large enough that the contrast stays well clear of the rounding
  // floor of 0.5 + contrast/2.
  const double alpha = 4.0, chi = 1.0;
  const double coeff = alpha * chi / std::sqrt(2.0);
  for (int k = 1; k <= 3; ++k) {
    const double t = 2.0 * kPi * k / (alpha * alpha * chi);  // cos argument 2 pi k
    const double contrast = 2.0 * (calibration::taylor_response(alpha, chi, t) - 0.5);
    CHECK(std::log(contrast) == doctest::Approx(-coeff * coeff * t * t).epsilon(1e-10));
  }
}

TEST_CASE("forward relations invert exactly") {
  const double chi = 2.0 * kPi * 13.8e3;
  const double s = 24.2;
  const double m1 = calibration::forward_m1(chi, s);
  const double m2 = calibration::forward_m2(chi, s);
  CHECK(m1 == doctest::Approx(s * chi / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(m2 == doctest::Approx(s * s * chi / (2.0 * kPi)).epsilon(1e-15));
  // chi = m1^2 / (pi m2), s = sqrt(2) pi m2 / m1, to round-off.
  CHECK(m1 * m1 / (kPi * m2) == doctest::Approx(chi).epsilon(1e-14));
  CHECK(std::sqrt(2.0) * kPi * m2 / m1 == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("synthetic sweep layout and determinism") {
  calibration::SyntheticSweepConfig cfg;
  const auto sweep = calibration::make_synthetic_sweep(cfg);
  REQUIRE(sweep.amplitudes_z.size() == 7);  // 0.40 .. 0.70 step 0.05
  CHECK(sweep.amplitudes_z[0] == doctest::Approx(0.40).epsilon(1e-12));
  CHECK(sweep.amplitudes_z[6] == doctest::Approx(0.70).epsilon(1e-12));
  REQUIRE(sweep.times.size() == 150);
  CHECK(sweep.p_e.rows() == 7);
  CHECK(sweep.p_e.cols() == 150);
  CHECK(sweep.times[149] == doctest::Approx(1.8e-6).epsilon(1e-12));

  calibration::SyntheticSweepConfig noisy = cfg;
  noisy.noise = 0.01;
  noisy.seed = 4;
  const auto a = calibration::make_synthetic_sweep(noisy);
  const auto b = calibration::make_synthetic_sweep(noisy);
  CHECK((a.p_e - b.p_e).cwiseAbs().maxCoeff() == 0.0);
  noisy.seed = 5;
  const auto c = calibration::make_synthetic_sweep(noisy);
  CHECK((a.p_e - c.p_e).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noiseless sweep recovers chi and s within one percent") {
  calibration::SyntheticSweepConfig cfg;
  const auto sweep = calibration::make_synthetic_sweep(cfg);
  const auto fit = calibration::fit_and_extract(sweep);
  CHECK(fit.per_amplitude.size() == 7);
  CHECK(fit.chi_est == doctest::Approx(cfg.chi).epsilon(0.01));
  CHECK(fit.s_est == doctest::Approx(cfg.s).epsilon(0.01));
}

TEST_CASE("one percent readout noise still recovers within five percent") {
  calibration::SyntheticSweepConfig cfg;
  cfg.noise = 0.01;
  cfg.seed = 12;
  const auto sweep = calibration::make_synthetic_sweep(cfg);
  const auto fit = calibration::fit_and_extract(sweep);
  MESSAGE("noisy-sweep estimates: chi ", fit.chi_est, " s ", fit.s_est);
  CHECK(fit.chi_est == doctest::Approx(cfg.chi).epsilon(0.05));
  CHECK(fit.s_est == doctest::Approx(cfg.s).epsilon(0.05));
}

TEST_CASE("undersized sweeps are rejected") {
  calibration::SyntheticSweepConfig cfg;
  const auto sweep = calibration::make_synthetic_sweep(cfg);

  calibration::RamseySweep few_amps = sweep;
  few_amps.amplitudes_z = sweep.amplitudes_z.head(2);
  few_amps.p_e = sweep.p_e.topRows(2);
  CHECK_THROWS_AS(calibration::fit_and_extract(few_amps), InvalidSpec);

  calibration::RamseySweep few_times = sweep;
  few_times.times = sweep.times.head(10);
  few_times.p_e = sweep.p_e.leftCols(10);
  CHECK_THROWS_AS(calibration::fit_and_extract(few_times), InvalidSpec);
}

TEST_CASE("hopeless data surfaces a fit failure") {
  calibration::SyntheticSweepConfig cfg;
  auto sweep = calibration::make_synthetic_sweep(cfg);
  // Replace the measurements with structureless noise far above threshold.
  rng::Engine eng(9);
  for (int i = 0; i < sweep.p_e.rows(); ++i)
    for (int j = 0; j < sweep.p_e.cols(); ++j)
      sweep.p_e(i, j) = eng.uniform();
  CHECK_THROWS_AS(calibration::fit_and_extract(sweep, 25e-6, 0.05), FitDiverged);
}

TEST_CASE("sinusoid fit recovers frequency, amplitude, and offset") {
  const int n = 200;
  RVec x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 10.0 * i / (n - 1.0);
    y[i] = 0.4 + 0.3 * std::cos(2.0 * kPi * 0.45 * x[i] + 1.1);
  }
  const auto fit = fit::fit_sinusoid(x, y);
  CHECK(fit.a0 == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(fit.a1 == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(fit.f == doctest::Approx(0.45).epsilon(1e-8));
  CHECK(std::remainder(fit.phase - 1.1, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(fit.a1 >= 0.0);
}

TEST_CASE("slope and quadratic least squares") {
  RVec x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y = 3.25 * x;
  CHECK(fit::fit_slope_through_origin(x, y) == doctest::Approx(3.25).epsilon(1e-14));

  RVec yq(5);
  for (int i = 0; i < 5; ++i) yq[i] = 0.7 + 2.1 * x[i] * x[i];
  double c0 = 0.0, c2 = 0.0;
  fit::fit_offset_quadratic(x, yq, &c0, &c2);
  CHECK(c0 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(c2 == doctest::Approx(2.1).epsilon(1e-12));
}

TEST_CASE("damped-fringe fit recovers planted parameters") {
  const int n = 150;
  RVec t(n), p(n);
  const double a = 0.5, a0 = 0.45, c = 1.3e6, f = 2.2e6, t2 = 30e-6;
  for (int i = 0; i < n; ++i) {
    t[i] = 1.8e-6 * i / (n - 1.0);
    p[i] = a + a0 * std::exp(-std::pow(c * t[i], 2)) * std::cos(2.0 * kPi * f * t[i]) *
                   std::exp(-t[i] / t2);
  }
  const auto fit = fit::fit_ramsey(t, p, 25e-6);
  CHECK(fit.a == doctest::Approx(a).epsilon(1e-6));
  CHECK(fit.a0 == doctest::Approx(a0).epsilon(1e-5));
  CHECK(std::abs(fit.c) == doctest::Approx(c).epsilon(1e-4));
  CHECK(fit.f == doctest::Approx(f).epsilon(1e-6));
  CHECK(fit.t2 == doctest::Approx(t2).epsilon(1e-3));
}

}  // TEST_SUITE
