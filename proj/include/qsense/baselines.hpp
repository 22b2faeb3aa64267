// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Conventional displacement-sensing baselines: stacked-ECD cat
// interferometry, exact and variationally prepared compass-state sensing,
// and four measurement channels (phase-preserving amplifier, squeezed
// single-quadrature, trapped-ion GKP phase estimation, two-mode squeezing)
// each feeding a from-scratch MLP classifier.

#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsense/fit.hpp"
#include "qsense/mlp.hpp"
#include "qsense/protocol.hpp"
#include "qsense/rng.hpp"
#include "qsense/tasks.hpp"
#include "qsense/training.hpp"
#include "qsense/types.hpp"

namespace qsense::baselines {

using mlp::MlpSpec;

// ---------------------------------------------------------------------------
// Channel configurations.

struct HeterodyneConfig {
  double n_sys = 1.0;  // total system noise photons (1 ideal, 2.3 HAYSTAC)
};

struct SqueezedConfig {
  double r = 0.46;       // squeeze parameter; +infinity = noiseless limit
  double axis_phi = 0.0;  // measured quadrature axis (trainable)
  int n_bins = 32;
  double scale = 7.2;  // one-hot binning covers [-scale, scale]
};

struct GkpIonConfig {
  double eta = 0.72;  // fringe visibility
  int rounds = 2;     // measurement rounds; 2 rounds = 4 bits
  RVec theta_x;       // per-round phase offsets (trainable); empty = 0, pi/2, ...
  RVec theta_p;
  double l_s = 2.5066282746310002;  // sqrt(2 pi) lattice constant
};

struct TmsConfig {
  double r = 0.46;  // two-mode squeeze parameter
};

// Two-mode squeezing bookkeeping: mean probe photons and quoted squeezing.
double tms_mean_photons(double r);   // 2 sinh^2 r
double tms_squeezing_db(double r);   // 10 log10 e^{2r}

struct CompassConfig {
  cplx beta{1.0, 0.0};      // compass size
  cplx beta_bar{0.0, 0.0};  // offset displacement applied after preparation
};

// ---------------------------------------------------------------------------
// Cat-state interferometry.

// Parameters of the stacked-ECD cat circuit: a pi/2 first rotation, then
// |beta_total| decomposed into fixed-0.24 conditional displacements (with
// alternating phases so they add) plus one remainder gate, and an identity
// final rotation so the zero-displacement response is exactly zero.
protocol::CircuitParams cat_circuit_params(cplx beta_total);

// Excitation probability of the cat circuit at one or many displacements.
// `ideal` selects gate-level evaluation; otherwise the composite-pulse model.
double cat_response(cplx beta_total, const Displacement& alpha, bool ideal);
RVec cat_response_batch(cplx beta_total, const std::vector<Displacement>& points,
                        bool ideal);

// Fisher information of a fringe p(x) = a0 + a1 cos(f x + phase) at its
// steepest point: F = 4 a1^2 f^2 (f in radians per unit displacement).
double cat_fisher_information(double a0, double a1, double f);
// Same, from a cyclic-frequency sinusoid fit (f_angular = 2 pi fit.f).
double cat_fisher_information(const fit::SinusoidFit& fit);

// ---------------------------------------------------------------------------
// Compass-state sensing.

// Ground-state probability of the exact compass protocol, evaluated from the
// closed-form six-branch coherent superposition with coherent overlaps
// <g|d> = exp(-|g|^2/2 - |d|^2/2 + conj(g) d).
double compass_exact_response(const CompassConfig& cfg, const Displacement& alpha);

// Entangled compass probe (|c4e>|e> + |c4g>|g>)/sqrt(2), normalized, in the
// truncated Fock space; the state-preparation target of the variational
// protocol.
HybridState compass_target_state(cplx beta, const FockSpec& spec);

struct CompassTrainConfig {
  int grid_size = 8;          // cells per axis of the coarse parameter search
  double beta_mag_max = 3.0;  // largest compass size scanned
  double offset_max = 1.5;    // offset displacement scan half-range
  int refine_iters = 60;      // pattern-search refinement iterations
  int train_size = 512;
  int test_size = 512;
  std::uint64_t seed = 0;
  int prep_depth = 10;  // circuit depth for variational preparation
  FockSpec fock{50};
  training::StatePrepConfig prep{};
};

struct CompassTrainResult {
  CompassConfig cfg;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Coarse grid search plus local pattern-search refinement of (beta,
// beta_bar) against the analytic response; accuracies use the better of the
// two readout label assignments.
CompassTrainResult compass_exact_train_eval(const tasks::TaskSpec& spec,
                                            const CompassTrainConfig& cfg);

struct CompassVariationalResult {
  CompassConfig cfg;
  protocol::CircuitParams prep;  // trained preparation circuit (magnitudes set)
  double prep_infidelity = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Variational version: picks (beta, beta_bar) on the analytic response,
// trains an ECD circuit to prepare the compass probe, and scores the
// resulting circuit in the truncated Fock space.
CompassVariationalResult compass_variational_train_eval(const tasks::TaskSpec& spec,
                                                        const CompassTrainConfig& cfg);

// Trainable-magnitude depth-1 sensing circuit: the trained-cat baseline.
training::FlatTrainResult cat_train_eval(const tasks::TaskSpec& spec,
                                         const training::TrainConfig& cfg,
                                         const protocol::ProtocolConfig& proto);

// ---------------------------------------------------------------------------
// Measurement channels (single draws).

// Unbiased quadrature estimate with per-component Gaussian noise of variance
// n_sys / 2 (infinite-gain phase-preserving amplifier).
std::pair<double, double> heterodyne_sample(const Displacement& alpha,
                                            const HeterodyneConfig& cfg,
                                            rng::Engine& eng);
std::pair<double, double> heterodyne_sample(const Displacement& alpha,
                                            const HeterodyneConfig& cfg,
                                            std::uint64_t seed);

// Projection of alpha onto the measurement axis with noise variance
// e^{-2r}/2, binned one-hot over [-scale, scale] with the raw value
// appended: n_bins + 1 features.
RVec squeezed_sample(const Displacement& alpha, const SqueezedConfig& cfg,
                     rng::Engine& eng);
RVec squeezed_sample(const Displacement& alpha, const SqueezedConfig& cfg,
                     std::uint64_t seed);

// Per round and quadrature, one Bernoulli bit with
// P = 1/2 + (eta/2) cos(alpha_q l_s + theta); bits ordered (x, p) per round.
std::vector<int> gkp_ion_sample(const Displacement& alpha, const GkpIonConfig& cfg,
                                rng::Engine& eng);
std::vector<int> gkp_ion_sample(const Displacement& alpha, const GkpIonConfig& cfg,
                                std::uint64_t seed);

// Both quadratures with independent noise of variance e^{-2r}/2 each.
std::pair<double, double> tms_sample(const Displacement& alpha, const TmsConfig& cfg,
                                     rng::Engine& eng);
std::pair<double, double> tms_sample(const Displacement& alpha, const TmsConfig& cfg,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Channel objects feeding the MLP backend.

class BaselineChannel {
 public:
  virtual ~BaselineChannel() = default;

  virtual int feature_size() const = 0;

  // Architecture the backend defaults to for this channel.
  virtual MlpSpec default_mlp() const;

  // Draw features for a batch of displacements into `out`
  // (feature_size x batch); consumes randomness from `eng`.
  virtual void sample_batch(const std::vector<Displacement>& points,
                            rng::Engine& eng, Eigen::MatrixXd& out) = 0;

  // Trainable encoding parameters (none by default).
  virtual int n_params() const { return 0; }
  virtual RVec params() const { return RVec(); }
  virtual void set_params(const RVec& params) { (void)params; }

  // Loss gradient with respect to the channel parameters, given
  // dLoss/dfeatures for the most recent sample_batch call.
  virtual RVec param_gradient(const Eigen::MatrixXd& feature_grad);
};

// Direct (x, p) passthrough; the no-noise reference channel.
class NoiselessChannel final : public BaselineChannel {
 public:
  int feature_size() const override { return 2; }
  void sample_batch(const std::vector<Displacement>& points, rng::Engine& eng,
                    Eigen::MatrixXd& out) override;
};

class HeterodyneChannel final : public BaselineChannel {
 public:
  explicit HeterodyneChannel(const HeterodyneConfig& cfg);
  int feature_size() const override { return 2; }
  void sample_batch(const std::vector<Displacement>& points, rng::Engine& eng,
                    Eigen::MatrixXd& out) override;

 private:
  HeterodyneConfig cfg_;
};

// Trainable parameter: the measurement axis (gradient flows through the raw
// feature only; the one-hot encoding is treated as constant).
class SqueezedChannel final : public BaselineChannel {
 public:
  explicit SqueezedChannel(const SqueezedConfig& cfg);
  int feature_size() const override { return cfg_.n_bins + 1; }
  MlpSpec default_mlp() const override;
  void sample_batch(const std::vector<Displacement>& points, rng::Engine& eng,
                    Eigen::MatrixXd& out) override;
  int n_params() const override { return 1; }
  RVec params() const override;
  void set_params(const RVec& params) override;
  RVec param_gradient(const Eigen::MatrixXd& feature_grad) override;

 private:
  SqueezedConfig cfg_;
  std::vector<Displacement> last_points_;
};

// Trainable parameters: the per-round phase offsets, updated with a
// straight-through estimator (bit gradient taken as dP/dtheta).
class GkpIonChannel final : public BaselineChannel {
 public:
  explicit GkpIonChannel(const GkpIonConfig& cfg);
  const GkpIonConfig& config() const { return cfg_; }
  int feature_size() const override { return 2 * cfg_.rounds; }
  void sample_batch(const std::vector<Displacement>& points, rng::Engine& eng,
                    Eigen::MatrixXd& out) override;
  int n_params() const override { return 2 * cfg_.rounds; }
  RVec params() const override;
  void set_params(const RVec& params) override;
  RVec param_gradient(const Eigen::MatrixXd& feature_grad) override;

 private:
  GkpIonConfig cfg_;
  std::vector<Displacement> last_points_;
};

class TmsChannel final : public BaselineChannel {
 public:
  explicit TmsChannel(const TmsConfig& cfg);
  int feature_size() const override { return 2; }
  MlpSpec default_mlp() const override;
  void sample_batch(const std::vector<Displacement>& points, rng::Engine& eng,
                    Eigen::MatrixXd& out) override;

 private:
  TmsConfig cfg_;
};

// ---------------------------------------------------------------------------
// MLP backend training.

struct MlpTrainConfig {
  int epochs = 5000;
  int train_size = 512;
  int test_size = 512;
  double lr = 1e-3;          // backend learning rate
  double channel_lr = 1e-2;  // learning rate for trainable channel parameters
  int average_window = 100;  // test-accuracy averaging window at the end
  std::uint64_t seed = 0;
};

// Trains the backend (and any trainable channel parameters) with fresh noise
// draws every epoch for both splits; returns the test accuracy averaged over
// the final `average_window` epochs.  Deterministic given the seed.
double mlp_train_eval(BaselineChannel& channel, const tasks::LabeledDataset& train,
                      const tasks::LabeledDataset& test, const MlpSpec& spec,
                      const MlpTrainConfig& cfg);
double mlp_train_eval(BaselineChannel& channel, const tasks::TaskSpec& spec,
                      const MlpSpec& mlp_spec, const MlpTrainConfig& cfg);

// Measurement-axis initialisation for the squeezed channel: the angle (from
// `n_angles` candidates) maximising the between-class to within-class
// variance ratio of the projections.
double squeezed_axis_init(const tasks::LabeledDataset& data, int n_angles = 8);

}  // namespace qsense::baselines
