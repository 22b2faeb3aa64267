// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Operators on the truncated oscillator space and on the joint
// qubit/oscillator space: ladder operators, displacements, qubit rotations,
// and the echoed conditional displacement (ECD) gate.
//
// Displacements are built from a cached eigendecomposition of the Hermitian
// generator i(a^dag - a), so every D(alpha) returned here is exactly unitary
// in the truncated space regardless of |alpha|.

#pragma once

#include <memory>

#include "qsense/types.hpp"

namespace qsense {

// Annihilation operator a in the number basis (n_fock x n_fock).
Mat build_annihilation(const FockSpec& spec);

// Displacement D(alpha) = exp(alpha a^dag - conj(alpha) a); n_fock x n_fock.
// Emits a truncation warning when the displaced vacuum's mean photon number
// |alpha|^2 exceeds n_fock / 4.
Mat build_displacement(const Displacement& alpha, const FockSpec& spec);

// Qubit rotation R(theta, phi) = exp[+i (theta/2)(cos(phi) sx + sin(phi) sy)]
// in the {|g>, |e>} basis with sz|g> = +|g>.  2 x 2.
Mat build_rotation(double theta, double phi);

// Echoed conditional displacement:
//   ECD(beta) = D(beta/2) |g><e| + D(-beta/2) |e><g|,
// acting on the joint space (2 n_fock x 2 n_fock, qubit-major layout).
Mat build_ecd(const Displacement& beta, const FockSpec& spec);

// Population of the excited qubit sector.
double excited_probability(const HybridState& psi);

// |<a|b>|^2.
double state_fidelity(const HybridState& a, const HybridState& b);

// ---------------------------------------------------------------------------
// Cached displacement factors.
//
// With G = a^dag - a (anti-Hermitian) and H = iG (Hermitian, eigensystem
// H = W L W^dag), a displacement of magnitude r along angle t is
//   D(r e^{it}) = P(t) W exp(-i r L) W^dag P(-t),   P(t) = diag(e^{i t n}).
// The eigensystem depends only on n_fock, so it is computed once per
// truncation dimension and shared.
// ---------------------------------------------------------------------------
class DisplacementFactors {
 public:
  explicit DisplacementFactors(const FockSpec& spec);

  int n_fock() const { return n_; }

  // Dense D(alpha).
  Mat build(cplx alpha) const;

  // out = D(alpha) * in, for a block of column states (n x B).  Avoids
  // forming the dense operator; used on hot paths with varying alpha.
  void apply(cplx alpha, const Eigen::Ref<const Mat>& in, Mat& out) const;

  // Shared, cached per n_fock.
  static const DisplacementFactors& get(const FockSpec& spec);

 private:
  int n_;
  Mat w_;        // eigenvectors of i(a^dag - a)
  RVec lambda_;  // eigenvalues
};

// Coherent-state column: D(alpha)|0> in the truncated space.
Vec coherent_state(cplx alpha, const FockSpec& spec);

}  // namespace qsense
