// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Assembly and evaluation of the displacement-sensing circuit
// R(theta', phi') U^dag D(alpha) U |0, g>: excitation probability at either
// gate-fidelity level, readout-error channel, and probability landscapes.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsense/chain.hpp"
#include "qsense/types.hpp"

namespace qsense::protocol {

// Circuit parameters for depth-N probes.  Rotation angles are stored as
// amplitudes of pi: theta_i = thetas[i] * pi, with thetas clamped to [0, 1]
// during training.  `magnitudes` is normally empty (the per-layer |beta_i|
// comes from ProtocolConfig::beta_magnitude); state-preparation training
// fills it with per-layer trained magnitudes.
struct CircuitParams {
  RVec thetas;
  RVec phis;
  RVec ecd_phases;
  double final_theta = 0.0;
  double final_phi = 0.0;
  RVec magnitudes;

  int depth() const { return static_cast<int>(thetas.size()); }
  bool has_magnitudes() const { return magnitudes.size() != 0; }

  // Flat layout matching chain::n_params: [thetas | phis | ecd_phases |
  // (magnitudes) | final_theta, final_phi].
  RVec to_flat() const;
  static CircuitParams from_flat(const RVec& flat, int depth, bool with_magnitudes);
};

enum class Fidelity { kIdealGate, kPulseLevel };

struct ProtocolConfig {
  int depth_N = 1;
  double beta_magnitude = 0.24;
  Fidelity fidelity = Fidelity::kIdealGate;
  FockSpec fock{50};
  pulse::PhysicalParams phys{};
  int trotter_steps = 5;  // pulse-level rotation discretization
};

struct ReadoutModel {
  double p_read_e_given_e = 0.95;
  double p_read_g_given_g = 0.96;
};

// chain::EvalOptions for this protocol configuration and gate model.
chain::EvalOptions eval_options(const ProtocolConfig& cfg, bool with_magnitudes,
                                chain::GateModel model);
chain::GateModel gate_model(Fidelity fidelity);

// Dense probe unitary U (layer i applies the rotation first, then the ECD).
Mat build_probe_unitary(const CircuitParams& params, const ProtocolConfig& cfg);

// Excitation probability for one sensed displacement.
double run_protocol(const Displacement& alpha, const CircuitParams& params,
                    const ProtocolConfig& cfg);

// Batched evaluation over many displacements; `jobs` splits the set into
// contiguous chunks evaluated on separate threads (result order fixed).
RVec run_protocol_batch(const std::vector<Displacement>& points,
                        const CircuitParams& params, const ProtocolConfig& cfg,
                        int jobs = 1);

// Classical readout-error channel on the excitation probability.
double apply_readout_error(double p_e, const ReadoutModel& m);

// Polar probability landscape.  Radii r_i = r_max * i / (n_radial - 1),
// azimuths phi_j = 2 pi j / n_azimuthal; values row-major over (i, j).
// With `shots` engaged each cell holds a binomial estimate from that many
// simulated shots (per-cell engine seeded by (master_seed, cell index));
// without it the exact probability.  No readout error is applied.
struct LandscapeGrid {
  int n_radial = 0;
  int n_azimuthal = 0;
  double r_max = 0.0;
  std::optional<int> shots;
  std::uint64_t master_seed = 0;
  RVec radii;
  RVec azimuths;
  RVec p_e;  // n_radial * n_azimuthal, row-major
};

LandscapeGrid landscape_sweep(const CircuitParams& params, const ProtocolConfig& cfg,
                              double r_max, int n_radial = 30, int n_azimuthal = 100,
                              std::optional<int> shots = 128,
                              std::uint64_t master_seed = 0, int jobs = 1);

// Readout bits for repeated shots at one displacement: Bernoulli draws of
// the readout-error-adjusted probability.  Bit 1 predicts class B.
std::vector<std::uint8_t> sample_predictions(const Displacement& alpha,
                                             const CircuitParams& params,
                                             const ProtocolConfig& cfg, int shots,
                                             std::uint64_t seed,
                                             const ReadoutModel& readout = {});

}  // namespace qsense::protocol
