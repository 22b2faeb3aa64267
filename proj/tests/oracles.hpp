// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by the test suites.  Each
// deliberately avoids the library's computational shortcuts: displacements
// come from a Pade matrix exponential instead of the cached
// eigendecomposition, circuit probabilities from dense operator products
// instead of the displaced-frame batch evaluator, envelope integrals from
// composite Simpson panels, trajectories from a Runge-Kutta integrator, and
// the compass / Ramsey responses from direct Fock-space gate products.

#pragma once

#include <functional>
#include <vector>

#include "qsense/protocol.hpp"
#include "qsense/pulse.hpp"
#include "qsense/tasks.hpp"
#include "qsense/types.hpp"

namespace qsense::oracle {

// Scaling-and-squaring Pade matrix exponential (Eigen unsupported module).
Mat matrix_exp(const Mat& a);

// D(alpha) = exp(alpha a^dag - conj(alpha) a) via the Pade exponential.
Mat displacement_pade(cplx alpha, int n_fock);

// Qubit rotation R(theta, phi) in the {|g>, |e>} basis (sz|g> = +|g>).
Eigen::Matrix2cd rotation_2x2(double theta, double phi);

// Embed a 2x2 qubit operator on the joint space (qubit-major blocks).
Mat embed_qubit(const Eigen::Matrix2cd& q, int n_fock);

// blockdiag(og, oe): oscillator operator conditioned on the qubit sector.
Mat embed_conditional(const Mat& og, const Mat& oe);

// Dense echoed conditional displacement D(b/2)|g><e| + D(-b/2)|e><g|.
Mat ecd_dense(cplx beta, int n_fock);

// Excitation probability of the full sensing circuit by dense operator
// products at the given gate model (kIdeal, kIdealPulseSensing, or kPulse),
// with no displaced-frame algebra anywhere.
double dense_protocol_probability(const Displacement& alpha,
                                  const protocol::CircuitParams& params,
                                  const protocol::ProtocolConfig& cfg,
                                  chain::GateModel model);

// Composite-Simpson reference quadrature of the pulse envelope integrals
//   I1(T) = int f(t) e^{+i chi t/2} dt,
//   I2(T) = int f(t) I1(t) e^{-i chi t/2} dt,
// on `panels` uniform panels (Simpson 1/3 per panel).
struct ReferenceIntegrals {
  cplx i1{0.0, 0.0};
  cplx i2{0.0, 0.0};
  double f_total = 0.0;
};
ReferenceIntegrals reference_integrals(const pulse::Waveform& w, double chi,
                                       int panels);

// Classic RK4 for the displaced-frame ODEs
//   alpha_g' = -i (chi/2) alpha_g - i eps(t),
//   alpha_e' = +i (chi/2) alpha_e - i eps(t),
//   phi_j'   = Re(conj(eps(t)) alpha_j),
// over [0, duration] in `steps` uniform steps.
struct FrameState {
  cplx alpha_g{0.0, 0.0};
  cplx alpha_e{0.0, 0.0};
  double phi_g = 0.0;
  double phi_e = 0.0;
};
FrameState integrate_frame_rk4(const std::function<cplx(double)>& eps, double chi,
                               cplx init_g, cplx init_e, double duration, int steps);

// Ground-state probability of the compass protocol
//   psi = Ucomp^dag D(alpha) D(beta_bar) Ucomp |0, g>
// simulated gate by gate in a truncated Fock space, with
//   Ucomp = Rh Dc(-i b) Rpi Dc(-b) Rh Rc(pi/4) Dc(2 b e^{i pi/4}) Rh,
//   Rh = (I + i sy)/sqrt(2), Rpi = i sy,
//   Dc(b) = D(b)|e><e| + |g><g|,  Rc(phi) = exp(i phi sx n).
double compass_fock_probability(cplx beta, cplx beta_bar, cplx alpha, int n_fock);

// Excitation probability of the dispersive Ramsey sequence on a coherent
// state: R(pi/2, pi/2), dispersive phases exp(-+ i chi t n / 2), R(pi/2,
// pi/2), measure.
double ramsey_fock_probability(double alpha, double chi, double t, int n_fock);

// Central finite differences (f(x + h e_k) - f(x - h e_k)) / 2h.
RVec finite_difference(const std::function<double(const RVec&)>& f, const RVec& x,
                       double h);

// Exhaustive affine separating-line search: projects onto `n_angles`
// directions spread over [0, pi) and looks for a gap between the classes.
bool linearly_separable(const tasks::LabeledDataset& data, int n_angles = 720);

}  // namespace qsense::oracle
