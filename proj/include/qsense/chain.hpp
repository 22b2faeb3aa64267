// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Batched evaluation of the displacement-sensing circuit
//
//   p_e(alpha) = || P_e R' U^dag D(alpha) U |0, g> ||^2,
//
// where U is a stack of qubit rotations and echoed conditional
// displacements.  The sensing displacement is never applied directly.
// Writing U~ = D^dag(alpha) U D(alpha) and using [P_e R', D] = 0,
//
//   p_e = || P_e R' U~^dag M(alpha) U |0, g> ||^2,
//
// where conjugating a rotation by D(alpha) leaves it unchanged, conjugating
// an ECD multiplies its two qubit blocks by phase kicks exp(-+ i gamma_i)
// with gamma_i = Im(alpha conj(beta_i)), and M(alpha) = D^dag(alpha) S(alpha)
// is the (tiny) residual of the modelled sensing pulse S against the ideal
// displacement.  At ideal gate fidelity M = 1 and the identity is exact;
// with the pulse-level sensing model M is a per-data-point correction,
// independent of the circuit parameters and therefore cached.  Either way
// every intermediate state stays near the phase-space origin, which is what
// makes a 50-level truncation sufficient for |alpha| up to the calibrated
// range.
//
// States for a whole dataset are carried as n_fock x B column blocks per
// qubit sector, so circuit application is a short sequence of GEMMs; the
// data point enters only through column-wise scalar phases and through M.
// Gradients come from one adjoint (costate) sweep; each parameter's
// contribution reduces to a handful of column-wise inner products.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qsense/fock.hpp"
#include "qsense/pulse.hpp"
#include "qsense/types.hpp"

namespace qsense::chain {

// Parameter families.
enum class Ansatz {
  kProtocol,      // fixed-|beta| layers + final rotation; 3N + 2 parameters
  kTrainableMag,  // adds per-layer ECD magnitudes; 4N + 2 parameters
  kStatePrep,     // trainable magnitudes, no final rotation; 4N parameters
};

// Gate model.
enum class GateModel {
  kIdeal,              // ideal gates, ideal sensing (M = 1)
  kIdealPulseSensing,  // ideal gates, pulse-level sensing correction M(alpha)
  kPulse,              // pulse-level gates and sensing (probabilities only)
};

struct EvalOptions {
  Ansatz ansatz = Ansatz::kProtocol;
  GateModel model = GateModel::kIdealPulseSensing;
  int depth = 1;
  double beta_mag = 0.24;
  FockSpec fock{50};
  pulse::PhysicalParams phys{};
  int trotter_steps = 5;
};

// Flat parameter layout helpers.  kProtocol: [amps | phis | ecd_phases |
// amp_f, phi_f]; kTrainableMag adds [mags] before the final pair;
// kStatePrep: [amps | phis | ecd_phases | mags].  Rotation angles are
// theta = pi * amp with amp clamped to [0, 1] during training.
int n_params(Ansatz ansatz, int depth);
// Indices of amplitude-type parameters (clamped to [0, 1]).
std::vector<int> amplitude_indices(Ansatz ansatz, int depth);

class Evaluator {
 public:
  Evaluator(EvalOptions opts, std::vector<Displacement> points);

  const EvalOptions& options() const { return opts_; }
  const std::vector<Displacement>& points() const { return points_; }
  int n_params() const { return chain::n_params(opts_.ansatz, opts_.depth); }

  // p_e for every point at the given parameters.
  RVec probabilities(const RVec& params) const;

  // Gradient of sum_i weights[i] * p_e[i]; optionally returns the p_e too.
  // Requires model != kPulse.
  RVec weighted_gradient(const RVec& params, const RVec& weights,
                         RVec* probs = nullptr) const;

 private:
  struct SensingCache;
  void ensure_sensing_cache() const;

  EvalOptions opts_;
  std::vector<Displacement> points_;
  Mat d_half_;  // D(beta_mag / 2), fixed-magnitude ansatz only
  mutable std::shared_ptr<const SensingCache> sensing_;
};

// Single-state evaluator for target-state preparation: psi(params) = U|0,g>
// with the kStatePrep ansatz, loss 1 - |<target|psi>|^2.
class StatePrepEvaluator {
 public:
  StatePrepEvaluator(EvalOptions opts, HybridState target);

  int n_params() const { return chain::n_params(Ansatz::kStatePrep, opts_.depth); }
  HybridState state(const RVec& params) const;
  double infidelity(const RVec& params) const;
  RVec gradient(const RVec& params, double* infidelity_out = nullptr) const;

 private:
  EvalOptions opts_;
  HybridState target_;
};

// Dense probe unitary U (no sensing displacement) on the joint space, at
// either gate model; used for small-scale checks and exported operators.
Mat probe_unitary(const RVec& params, const EvalOptions& opts);

}  // namespace qsense::chain
