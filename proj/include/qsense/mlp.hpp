// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal dense multi-layer perceptron used as the classical post-processor
// behind the conventional-sensing channels: rectifier hidden layers, softmax
// cross-entropy loss, full-batch Adam.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qsense/rng.hpp"
#include "qsense/types.hpp"

namespace qsense::mlp {

struct MlpSpec {
  std::vector<int> layer_sizes;  // e.g. {2, 64, 64, 2}
};

class Network {
 public:
  // He-initialised weights drawn from `eng` (zero biases).
  Network(const MlpSpec& spec, rng::Engine& eng,
          double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
          double eps = 1e-8);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  // Class scores for a batch (inputs column-major: input_size x B).
  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const;

  // Fraction of columns whose arg-max score matches the label.
  double accuracy(const Eigen::MatrixXd& x, const std::vector<int>& labels) const;

  // One full-batch Adam step on the softmax cross-entropy; returns the loss.
  // When input_grad is non-null it receives dLoss/dx (same shape as x), for
  // channels with trainable encoding parameters.
  double train_step(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                    Eigen::MatrixXd* input_grad = nullptr);

 private:
  struct Layer {
    Eigen::MatrixXd w, m_w, v_w;
    Eigen::VectorXd b, m_b, v_b;
  };
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
};

}  // namespace qsense::mlp
