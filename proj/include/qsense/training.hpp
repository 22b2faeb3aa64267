// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Loss, accuracy, adjoint gradients, and Adam optimization with random
// restarts for sensing-circuit parameters, plus fidelity-targeted
// state-preparation training.

#pragma once

#include <cstdint>
#include <vector>

#include "qsense/chain.hpp"
#include "qsense/protocol.hpp"
#include "qsense/tasks.hpp"
#include "qsense/types.hpp"

namespace qsense::training {

// Stream salts for dataset derivation from a master seed.  Shared across the
// circuit trainer and the baseline runners so that every protocol trained
// with the same seed sees the same train/test draws.
inline constexpr std::uint64_t kTrainDataSalt = 0x74726169;
inline constexpr std::uint64_t kTestDataSalt = 0x74657374;

struct TrainConfig {
  double lr = 5e-3;
  int epochs = 1000;   // 1000 for size-512 datasets, 250 for size-2048
  int restarts = 10;
  int train_size = 512;
  int test_size = 512;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct TrainReport {
  // Histories of the selected restart: loss before each epoch's update and
  // test accuracy after it (equal lengths).
  RVec loss_history;
  RVec accuracy_history;
  protocol::CircuitParams best_params;
  double best_accuracy = 0.0;  // test accuracy of the selected restart
  int best_restart = 0;
  RVec restart_train_accuracy;  // final train accuracy per restart
  RVec restart_test_accuracy;   // final test accuracy per restart
};

// Adam with projection of selected coordinates onto [0, 1] after each step.
class Adam {
 public:
  Adam(int dim, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  void step(RVec& params, const RVec& grad);

 private:
  RVec m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
};

// P(correct) = 1/2 + (p_B - p_A) / 2 from the two class-mean excitation
// probabilities; equals 1/2 - loss/2 exactly.
double classification_accuracy(double p_a_mean, double p_b_mean);

// Per-point weights w such that sum_i w_i p_i = mean_A(p) - mean_B(p).
RVec class_weights(const tasks::LabeledDataset& data);

// Loss and accuracy from a probability vector aligned with data.labels.
double loss_from_probabilities(const RVec& probs, const tasks::LabeledDataset& data);
double accuracy_from_probabilities(const RVec& probs, const tasks::LabeledDataset& data);

// Loss L = mean_A(p_e) - mean_B(p_e) at the configured fidelity.
double loss(const protocol::CircuitParams& params, const protocol::ProtocolConfig& cfg,
            const tasks::LabeledDataset& data);

// Adjoint gradient of the loss in the flat parameter layout.  Ideal-gate
// fidelity uses ideal sensing; pulse-level fidelity uses ideal gates with
// the cached pulse-level sensing correction (full-pulse gradients are not
// defined).
RVec gradients(const protocol::CircuitParams& params, const protocol::ProtocolConfig& cfg,
               const tasks::LabeledDataset& data);

// Restarted Adam descent on prepared datasets with an arbitrary ansatz;
// building block for train() and the trainable-magnitude baselines.
struct FlatTrainResult {
  RVec best_flat;
  RVec loss_history;
  RVec accuracy_history;
  double best_train_accuracy = 0.0;
  double best_test_accuracy = 0.0;
  int best_restart = 0;
  RVec restart_train_accuracy;
  RVec restart_test_accuracy;
};
FlatTrainResult train_flat(const TrainConfig& cfg, const chain::EvalOptions& opts,
                           const tasks::LabeledDataset& train_data,
                           const tasks::LabeledDataset& test_data);

// Full protocol training on a task: generates seeded train/test datasets,
// runs restarts (init: phases uniform on [0, 2pi), amplitudes on [0, 1]),
// selects the restart with the highest final training accuracy, and reports
// its test accuracy.  Always trains with ideal gates plus the pulse-level
// sensing correction.
TrainReport train(const TrainConfig& cfg_train, const protocol::ProtocolConfig& cfg_proto,
                  const tasks::TaskSpec& spec);

// Fidelity-targeted state preparation |target> ~ U|0,g> with trainable ECD
// magnitudes (no final rotation); returns params with magnitudes filled.
// Emits a convergence warning if the best infidelity exceeds 0.05.
struct StatePrepConfig {
  double lr = 5e-3;
  int epochs = 4000;
  int restarts = 5;
  int decay_start = 1500;  // epoch at which the learning rate starts halving
  int decay_every = 500;
  double decay_factor = 0.5;
  std::uint64_t seed = 7;
};
protocol::CircuitParams train_state_prep(const HybridState& target, int depth,
                                         const protocol::ProtocolConfig& cfg,
                                         const StatePrepConfig& sp = {},
                                         double* best_infidelity = nullptr);

}  // namespace qsense::training
