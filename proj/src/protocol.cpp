// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/protocol.hpp"

#include <cmath>

#include "qsense/parallel.hpp"
#include "qsense/rng.hpp"

namespace qsense::protocol {

RVec CircuitParams::to_flat() const {
  const int n = depth();
  if (phis.size() != n || ecd_phases.size() != n)
    throw InvalidSpec("circuit parameter arrays have inconsistent lengths");
  if (has_magnitudes() && magnitudes.size() != n)
    throw InvalidSpec("per-layer magnitudes have inconsistent length");
  RVec flat(has_magnitudes() ? 4 * n + 2 : 3 * n + 2);
  flat.segment(0, n) = thetas;
  flat.segment(n, n) = phis;
  flat.segment(2 * n, n) = ecd_phases;
  if (has_magnitudes()) flat.segment(3 * n, n) = magnitudes;
  flat[flat.size() - 2] = final_theta;
  flat[flat.size() - 1] = final_phi;
  return flat;
}

CircuitParams CircuitParams::from_flat(const RVec& flat, int depth, bool with_magnitudes) {
  const int expect = with_magnitudes ? 4 * depth + 2 : 3 * depth + 2;
  if (flat.size() != expect) throw InvalidSpec("flat parameter vector has wrong size");
  CircuitParams p;
  p.thetas = flat.segment(0, depth);
  p.phis = flat.segment(depth, depth);
  p.ecd_phases = flat.segment(2 * depth, depth);
  if (with_magnitudes) p.magnitudes = flat.segment(3 * depth, depth);
  p.final_theta = flat[flat.size() - 2];
  p.final_phi = flat[flat.size() - 1];
  return p;
}

chain::GateModel gate_model(Fidelity fidelity) {
  return fidelity == Fidelity::kIdealGate ? chain::GateModel::kIdeal
                                          : chain::GateModel::kPulse;
}

chain::EvalOptions eval_options(const ProtocolConfig& cfg, bool with_magnitudes,
                                chain::GateModel model) {
  if (cfg.depth_N < 1) throw InvalidSpec("depth_N must be >= 1");
  chain::EvalOptions opts;
  opts.ansatz = with_magnitudes ? chain::Ansatz::kTrainableMag : chain::Ansatz::kProtocol;
  opts.model = model;
  opts.depth = cfg.depth_N;
  opts.beta_mag = cfg.beta_magnitude;
  opts.fock = cfg.fock;
  opts.phys = cfg.phys;
  opts.trotter_steps = cfg.trotter_steps;
  return opts;
}

Mat build_probe_unitary(const CircuitParams& params, const ProtocolConfig& cfg) {
  if (params.depth() != cfg.depth_N) throw InvalidSpec("params sized for a different depth");
  return chain::probe_unitary(params.to_flat(),
                              eval_options(cfg, params.has_magnitudes(),
                                           gate_model(cfg.fidelity)));
}

double run_protocol(const Displacement& alpha, const CircuitParams& params,
                    const ProtocolConfig& cfg) {
  chain::Evaluator ev(eval_options(cfg, params.has_magnitudes(), gate_model(cfg.fidelity)),
                      {alpha});
  return ev.probabilities(params.to_flat())[0];
}

RVec run_protocol_batch(const std::vector<Displacement>& points,
                        const CircuitParams& params, const ProtocolConfig& cfg,
                        int jobs) {
  if (params.depth() != cfg.depth_N) throw InvalidSpec("params sized for a different depth");
  const RVec flat = params.to_flat();
  const chain::EvalOptions opts =
      eval_options(cfg, params.has_magnitudes(), gate_model(cfg.fidelity));
  const int n = static_cast<int>(points.size());
  RVec out(n);
  parallel_for_chunks(n, jobs, [&](int begin, int end) {
    std::vector<Displacement> chunk(points.begin() + begin, points.begin() + end);
    chain::Evaluator ev(opts, std::move(chunk));
    out.segment(begin, end - begin) = ev.probabilities(flat);
  });
  return out;
}

double apply_readout_error(double p_e, const ReadoutModel& m) {
  return p_e * m.p_read_e_given_e + (1.0 - p_e) * (1.0 - m.p_read_g_given_g);
}

LandscapeGrid landscape_sweep(const CircuitParams& params, const ProtocolConfig& cfg,
                              double r_max, int n_radial, int n_azimuthal,
                              std::optional<int> shots, std::uint64_t master_seed,
                              int jobs) {
  if (n_radial < 2 || n_azimuthal < 1) throw InvalidSpec("landscape grid too small");
  if (shots && *shots < 1) throw InvalidSpec("shots must be >= 1");
  LandscapeGrid grid;
  grid.n_radial = n_radial;
  grid.n_azimuthal = n_azimuthal;
  grid.r_max = r_max;
  grid.shots = shots;
  grid.master_seed = master_seed;
  grid.radii.resize(n_radial);
  for (int i = 0; i < n_radial; ++i) grid.radii[i] = r_max * i / (n_radial - 1);
  grid.azimuths.resize(n_azimuthal);
  for (int j = 0; j < n_azimuthal; ++j) grid.azimuths[j] = 2.0 * kPi * j / n_azimuthal;

  std::vector<Displacement> cells;
  cells.reserve(static_cast<std::size_t>(n_radial) * n_azimuthal);
  for (int i = 0; i < n_radial; ++i)
    for (int j = 0; j < n_azimuthal; ++j)
      cells.push_back({grid.radii[i] * std::cos(grid.azimuths[j]),
                       grid.radii[i] * std::sin(grid.azimuths[j])});

  grid.p_e = run_protocol_batch(cells, params, cfg, jobs);
  if (shots) {
    const int m = *shots;
    for (int c = 0; c < grid.p_e.size(); ++c) {
      rng::Engine eng(rng::mix(master_seed, static_cast<std::uint64_t>(c)));
      int hits = 0;
      for (int k = 0; k < m; ++k) hits += eng.bernoulli(grid.p_e[c]) ? 1 : 0;
      grid.p_e[c] = static_cast<double>(hits) / m;
    }
  }
  return grid;
}

std::vector<std::uint8_t> sample_predictions(const Displacement& alpha,
                                             const CircuitParams& params,
                                             const ProtocolConfig& cfg, int shots,
                                             std::uint64_t seed,
                                             const ReadoutModel& readout) {
  if (shots < 1) throw InvalidSpec("shots must be >= 1");
  const double p_obs = apply_readout_error(run_protocol(alpha, params, cfg), readout);
  rng::Engine eng(seed);
  std::vector<std::uint8_t> bits(shots);
  for (int k = 0; k < shots; ++k) bits[k] = eng.bernoulli(p_obs) ? 1 : 0;
  return bits;
}

}  // namespace qsense::protocol
