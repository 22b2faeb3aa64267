// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>

#include <doctest.h>

#include "oracles.hpp"
#include "qsense/fock.hpp"
#include "qsense/rng.hpp"
#include "qsense/types.hpp"

using namespace qsense;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Mat& u) {
  return max_abs(u.adjoint() * u - Mat::Identity(u.rows(), u.cols()));
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("annihilation operator matrix elements") {
  const Mat a2 = build_annihilation(FockSpec{2});
  CHECK(a2(0, 0) == cplx(0.0, 0.0));
  CHECK(a2(0, 1) == cplx(1.0, 0.0));
  CHECK(a2(1, 0) == cplx(0.0, 0.0));
  CHECK(a2(1, 1) == cplx(0.0, 0.0));

  const Mat a3 = build_annihilation(FockSpec{3});
  CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a3(1, 2).imag() == 0.0);

  // Number operator diagonal 0, 1, ..., n-1.
  const Mat num = a3.adjoint() * a3;
  for (int m = 0; m < 3; ++m) {
    CHECK(num(m, m).real() == doctest::Approx(static_cast<double>(m)).epsilon(1e-14));
  }
}

TEST_CASE("zero displacement is the identity") {
  const Mat d = build_displacement({0.0, 0.0}, FockSpec{20});
  CHECK(max_abs(d - Mat::Identity(20, 20)) < 1e-13);
}

TEST_CASE("displaced vacuum has mean photon number |alpha|^2") {
  const FockSpec spec{50};
  const Mat d = build_displacement({0.6, 0.8}, spec);  // |alpha| = 1
  const Vec psi = d.col(0);
  const Mat a = build_annihilation(spec);
  const double nbar = (a * psi).squaredNorm();
  CHECK(nbar == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("displacement composition law with geometric phase") {
  const FockSpec spec{50};
  const cplx a(0.3, 0.0), b(0.0, 0.4);
  const Mat prod = build_displacement(Displacement::from(a), spec) *
                   build_displacement(Displacement::from(b), spec);
  const cplx phase = std::exp(0.5 * (a * std::conj(b) - std::conj(a) * b));
  const Mat composed = phase * build_displacement(Displacement::from(a + b), spec);
  // Elementwise agreement on the retained subspace (top rows feel the
  // truncation boundary; the displaced states live well below it).
  CHECK(max_abs((prod - composed).topLeftCorner(40, 40)) < 1e-6);
}

TEST_CASE("displacement matches the Pade-exponential oracle") {
  const FockSpec spec{32};
  const cplx alpha(0.7, -0.4);
  const Mat lib = build_displacement(Displacement::from(alpha), spec);
  const Mat ref = oracle::displacement_pade(alpha, 32);
  // The eigendecomposition and Pade constructions differ only at the
  // truncation boundary; compare on the core block.
  CHECK(max_abs((lib - ref).topLeftCorner(24, 24)) < 1e-10);
}

TEST_CASE("large displacement emits a truncation warning") {
  WarningCapture capture;
  (void)build_displacement({4.0, 0.0}, FockSpec{50});  // <n> = 16 > 50/4
  CHECK(capture.saw(WarningKind::kTruncation));
}

TEST_CASE("rotation special cases") {
  CHECK(max_abs(build_rotation(0.0, 0.3) - Mat::Identity(2, 2)) < 1e-15);

  // R(pi, 0) = i sx: flips |g> to i|e>.
  const Mat r = build_rotation(kPi, 0.0);
  CHECK(std::abs(r(0, 0)) < 1e-15);
  CHECK(std::abs(r(1, 0) - cplx(0.0, 1.0)) < 1e-15);

  const Mat fwd = build_rotation(1.234, 0.7);
  const Mat bwd = build_rotation(-1.234, 0.7);
  CHECK(max_abs(fwd * bwd - Mat::Identity(2, 2)) < 1e-14);

  // Convention anchor: R(pi/2, pi/2) = [[1, 1], [-1, 1]] / sqrt(2).
  const Mat h = build_rotation(kPi / 2.0, kPi / 2.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(h(0, 0) - inv_sqrt2) < 1e-14);
  CHECK(std::abs(h(0, 1) - inv_sqrt2) < 1e-14);
  CHECK(std::abs(h(1, 0) + inv_sqrt2) < 1e-14);
  CHECK(std::abs(h(1, 1) - inv_sqrt2) < 1e-14);
}

TEST_CASE("rotation matches the 2x2 oracle") {
  const Mat lib = build_rotation(0.83, -1.9);
  const Eigen::Matrix2cd ref = oracle::rotation_2x2(0.83, -1.9);
  CHECK(std::abs(lib(0, 0) - ref(0, 0)) < 1e-14);
  CHECK(std::abs(lib(0, 1) - ref(0, 1)) < 1e-14);
  CHECK(std::abs(lib(1, 0) - ref(1, 0)) < 1e-14);
  CHECK(std::abs(lib(1, 1) - ref(1, 1)) < 1e-14);
}

TEST_CASE("ecd on the ground state lands in the displaced excited branch") {
  const FockSpec spec{50};
  const Mat ecd = build_ecd({0.24, 0.0}, spec);
  HybridState psi = HybridState::vacuum(spec);
  psi.amplitudes = ecd * psi.amplitudes;
  CHECK(psi.ground().norm() < 1e-14);
  const Vec target = coherent_state(cplx(-0.12, 0.0), spec);
  CHECK(std::abs(std::abs(psi.excited().dot(target)) - 1.0) < 1e-12);
}

TEST_CASE("ecd squared is the identity") {
  // D(b/2) D(-b/2) carries no geometric phase (collinear arguments), so the
  // double ECD restores both sectors exactly.
  const FockSpec spec{40};
  const Mat ecd = build_ecd({0.17, 0.31}, spec);
  const Mat ref =
      oracle::ecd_dense(cplx(0.17, 0.31), 40);  // independent construction
  CHECK(max_abs((ecd - ref).topLeftCorner(60, 60)) < 1e-10);
  CHECK(max_abs(ecd * ecd - Mat::Identity(80, 80)) < 1e-12);
}

TEST_CASE("ecd splits an equal superposition into the two coherent branches") {
  const FockSpec spec{50};
  const cplx beta(0.24, 0.0);
  const Mat ecd = build_ecd(Displacement::from(beta), spec);
  HybridState psi = HybridState::vacuum(spec);
  psi.amplitudes[0] = 1.0 / std::sqrt(2.0);
  psi.amplitudes[50] = 1.0 / std::sqrt(2.0);
  psi.amplitudes = ecd * psi.amplitudes;

  HybridState target;
  target.n_fock = 50;
  target.amplitudes = Vec::Zero(100);
  target.ground() = coherent_state(beta / 2.0, spec) / std::sqrt(2.0);
  target.excited() = coherent_state(-beta / 2.0, spec) / std::sqrt(2.0);
  CHECK(state_fidelity(psi, target) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("excited probability basics") {
  const FockSpec spec{8};
  HybridState g = HybridState::vacuum(spec);
  CHECK(excited_probability(g) == 0.0);

  HybridState e = HybridState::vacuum(spec);
  e.amplitudes[0] = 0.0;
  e.amplitudes[8] = 1.0;
  CHECK(excited_probability(e) == 1.0);

  HybridState half = HybridState::vacuum(spec);
  half.amplitudes[0] = 1.0 / std::sqrt(2.0);
  half.amplitudes[8] = 1.0 / std::sqrt(2.0);
  CHECK(excited_probability(half) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("ground and excited populations sum to one") {
  const FockSpec spec{16};
  rng::Engine eng(11);
  HybridState psi = HybridState::vacuum(spec);
  for (int k = 0; k < 32; ++k) psi.amplitudes[k] = cplx(eng.normal(), eng.normal());
  psi.amplitudes.normalize();
  const double pe = excited_probability(psi);
  const double pg = psi.ground().squaredNorm();
  CHECK(std::abs(pe + pg - 1.0) < 1e-12);
}

TEST_CASE("state fidelity basics") {
  const FockSpec spec{50};
  HybridState a = HybridState::vacuum(spec);
  CHECK(state_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-15));

  HybridState b = HybridState::vacuum(spec);
  b.amplitudes[0] = 0.0;
  b.amplitudes[1] = 1.0;
  CHECK(state_fidelity(a, b) == 0.0);

  HybridState coh = HybridState::vacuum(spec);
  coh.ground() = coherent_state(cplx(1.0, 0.0), spec);
  CHECK(state_fidelity(a, coh) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("gate operators are unitary across the operating range") {
  const FockSpec spec{50};
  for (double mag : {0.24, 1.0, 4.0, 10.0}) {
    WarningCapture capture;  // large displacements warn; unitarity must hold
    const Mat d = build_displacement({mag / std::sqrt(2.0), mag / std::sqrt(2.0)}, spec);
    CHECK(unitarity_defect(d) < 1e-8);
    const Mat ecd = build_ecd({0.0, mag / 2.0}, spec);
    CHECK(unitarity_defect(ecd) < 1e-8);
  }
  CHECK(unitarity_defect(build_rotation(2.7, -0.4)) < 1e-14);
}

TEST_CASE("cached displacement factors match the direct construction") {
  const FockSpec spec{30};
  const auto& fac = DisplacementFactors::get(spec);
  CHECK(fac.n_fock() == 30);
  const cplx alpha(0.45, -1.2);
  const Mat direct = build_displacement(Displacement::from(alpha), spec);
  CHECK(max_abs(fac.build(alpha) - direct) < 1e-12);

  rng::Engine eng(3);
  Mat block(30, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 30; ++i) block(i, j) = cplx(eng.normal(), eng.normal());
  Mat out;
  fac.apply(alpha, block, out);
  CHECK(max_abs(out - direct * block) < 1e-11);
}

TEST_CASE("coherent state column equals the displaced vacuum") {
  const FockSpec spec{50};
  const cplx alpha(0.9, 0.3);
  const Vec lib = coherent_state(alpha, spec);
  const Vec ref = oracle::displacement_pade(alpha, 50).col(0);
  CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-10);
}

}  // TEST_SUITE
