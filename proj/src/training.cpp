// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/training.hpp"

#include <algorithm>
#include <cmath>

#include "qsense/rng.hpp"

namespace qsense::training {

namespace {
constexpr std::uint64_t kRestartSalt = 0x72737472;
}  // namespace

Adam::Adam(int dim, double lr, double beta1, double beta2, double eps)
    : m_(RVec::Zero(dim)), v_(RVec::Zero(dim)), lr_(lr), beta1_(beta1), beta2_(beta2),
      eps_(eps) {}

void Adam::step(RVec& params, const RVec& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (int i = 0; i < params.size(); ++i) {
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

double classification_accuracy(double p_a_mean, double p_b_mean) {
  return 0.5 + 0.5 * (p_b_mean - p_a_mean);
}

RVec class_weights(const tasks::LabeledDataset& data) {
  const int na = data.class_count(tasks::Label::kA);
  const int nb = data.class_count(tasks::Label::kB);
  if (na == 0 || nb == 0) throw InvalidSpec("dataset must contain both classes");
  RVec w(data.size());
  for (int i = 0; i < data.size(); ++i)
    w[i] = data.labels[i] == tasks::Label::kA ? 1.0 / na : -1.0 / nb;
  return w;
}

double loss_from_probabilities(const RVec& probs, const tasks::LabeledDataset& data) {
  if (probs.size() != data.size()) throw InvalidSpec("probability vector size mismatch");
  return class_weights(data).dot(probs);
}

double accuracy_from_probabilities(const RVec& probs, const tasks::LabeledDataset& data) {
  return 0.5 - 0.5 * loss_from_probabilities(probs, data);
}

namespace {

chain::GateModel loss_model(protocol::Fidelity fidelity) {
  // Gradient-capable models only: pulse-level requests map to ideal gates
  // with the cached pulse-level sensing correction.
  return fidelity == protocol::Fidelity::kIdealGate
             ? chain::GateModel::kIdeal
             : chain::GateModel::kIdealPulseSensing;
}

}  // namespace

double loss(const protocol::CircuitParams& params, const protocol::ProtocolConfig& cfg,
            const tasks::LabeledDataset& data) {
  chain::Evaluator ev(
      protocol::eval_options(cfg, params.has_magnitudes(), loss_model(cfg.fidelity)),
      data.points);
  return loss_from_probabilities(ev.probabilities(params.to_flat()), data);
}

RVec gradients(const protocol::CircuitParams& params, const protocol::ProtocolConfig& cfg,
               const tasks::LabeledDataset& data) {
  chain::Evaluator ev(
      protocol::eval_options(cfg, params.has_magnitudes(), loss_model(cfg.fidelity)),
      data.points);
  return ev.weighted_gradient(params.to_flat(), class_weights(data));
}

FlatTrainResult train_flat(const TrainConfig& cfg, const chain::EvalOptions& opts,
                           const tasks::LabeledDataset& train_data,
                           const tasks::LabeledDataset& test_data) {
  if (cfg.epochs < 1 || cfg.restarts < 1) throw InvalidSpec("epochs and restarts must be >= 1");
  if (cfg.lr <= 0.0) throw InvalidSpec("learning rate must be positive");
  const int dim = chain::n_params(opts.ansatz, opts.depth);
  const std::vector<int> amp_idx = chain::amplitude_indices(opts.ansatz, opts.depth);
  const chain::Evaluator train_ev(opts, train_data.points);
  const chain::Evaluator test_ev(opts, test_data.points);
  const RVec weights = class_weights(train_data);

  FlatTrainResult result;
  result.restart_train_accuracy.resize(cfg.restarts);
  result.restart_test_accuracy.resize(cfg.restarts);
  double best_train_acc = -1.0;

  for (int r = 0; r < cfg.restarts; ++r) {
    rng::Engine eng(rng::mix(cfg.seed, kRestartSalt, static_cast<std::uint64_t>(r)));
    RVec params(dim);
    for (int i = 0; i < dim; ++i) params[i] = eng.uniform(0.0, 2.0 * kPi);
    for (int i : amp_idx) params[i] = eng.uniform();

    Adam adam(dim, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    RVec loss_hist(cfg.epochs), acc_hist(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      RVec probs;
      const RVec grad = train_ev.weighted_gradient(params, weights, &probs);
      loss_hist[epoch] = loss_from_probabilities(probs, train_data);
      adam.step(params, grad);
      for (int i : amp_idx) params[i] = std::clamp(params[i], 0.0, 1.0);
      acc_hist[epoch] =
          accuracy_from_probabilities(test_ev.probabilities(params), test_data);
    }
    const double train_acc =
        accuracy_from_probabilities(train_ev.probabilities(params), train_data);
    const double test_acc = acc_hist[cfg.epochs - 1];
    result.restart_train_accuracy[r] = train_acc;
    result.restart_test_accuracy[r] = test_acc;
    if (train_acc > best_train_acc) {
      best_train_acc = train_acc;
      result.best_restart = r;
      result.best_flat = params;
      result.loss_history = loss_hist;
      result.accuracy_history = acc_hist;
      result.best_train_accuracy = train_acc;
      result.best_test_accuracy = test_acc;
    }
  }
  return result;
}

TrainReport train(const TrainConfig& cfg_train, const protocol::ProtocolConfig& cfg_proto,
                  const tasks::TaskSpec& spec) {
  tasks::LabeledDataset train_data =
      tasks::generate(spec, cfg_train.train_size, rng::mix(cfg_train.seed, kTrainDataSalt));
  train_data.role = tasks::Role::kTrain;
  tasks::LabeledDataset test_data =
      tasks::generate(spec, cfg_train.test_size, rng::mix(cfg_train.seed, kTestDataSalt));
  test_data.role = tasks::Role::kTest;

  // Training always runs with ideal gates plus the cached pulse-level
  // sensing correction, independent of the evaluation fidelity.
  const chain::EvalOptions opts =
      protocol::eval_options(cfg_proto, false, chain::GateModel::kIdealPulseSensing);
  const FlatTrainResult flat = train_flat(cfg_train, opts, train_data, test_data);

  TrainReport report;
  report.loss_history = flat.loss_history;
  report.accuracy_history = flat.accuracy_history;
  report.best_params =
      protocol::CircuitParams::from_flat(flat.best_flat, cfg_proto.depth_N, false);
  report.best_accuracy = flat.best_test_accuracy;
  report.best_restart = flat.best_restart;
  report.restart_train_accuracy = flat.restart_train_accuracy;
  report.restart_test_accuracy = flat.restart_test_accuracy;
  return report;
}

protocol::CircuitParams train_state_prep(const HybridState& target, int depth,
                                         const protocol::ProtocolConfig& cfg,
                                         const StatePrepConfig& sp,
                                         double* best_infidelity) {
  chain::EvalOptions opts = protocol::eval_options(cfg, true, chain::GateModel::kIdeal);
  opts.ansatz = chain::Ansatz::kStatePrep;
  opts.depth = depth;
  const chain::StatePrepEvaluator ev(opts, target);
  const int dim = chain::n_params(chain::Ansatz::kStatePrep, depth);
  const std::vector<int> amp_idx = chain::amplitude_indices(chain::Ansatz::kStatePrep, depth);

  RVec best;
  double best_inf = 2.0;
  for (int r = 0; r < sp.restarts; ++r) {
    rng::Engine eng(rng::mix(sp.seed, kRestartSalt, static_cast<std::uint64_t>(r)));
    RVec params(dim);
    for (int i = 0; i < dim; ++i) params[i] = eng.uniform(0.0, 2.0 * kPi);
    for (int i : amp_idx) params[i] = eng.uniform();
    for (int i = 3 * depth; i < 4 * depth; ++i) params[i] = eng.uniform();

    Adam adam(dim, sp.lr);
    double lr = sp.lr;
    for (int epoch = 0; epoch < sp.epochs; ++epoch) {
      if (epoch >= sp.decay_start && (epoch - sp.decay_start) % sp.decay_every == 0) {
        lr *= sp.decay_factor;
        adam.set_lr(lr);
      }
      double inf = 0.0;
      const RVec grad = ev.gradient(params, &inf);
      adam.step(params, grad);
      for (int i : amp_idx) params[i] = std::clamp(params[i], 0.0, 1.0);
    }
    const double inf = ev.infidelity(params);
    if (inf < best_inf) {
      best_inf = inf;
      best = params;
    }
  }
  if (best_infidelity) *best_infidelity = best_inf;
  if (best_inf > 0.05)
    emit_warning(WarningKind::kConvergence,
                 "state preparation did not converge: infidelity " + std::to_string(best_inf));

  protocol::CircuitParams out;
  out.thetas = best.segment(0, depth);
  out.phis = best.segment(depth, depth);
  out.ecd_phases = best.segment(2 * depth, depth);
  out.magnitudes = best.segment(3 * depth, depth);
  out.final_theta = 0.0;
  out.final_phi = 0.0;
  return out;
}

}  // namespace qsense::training
