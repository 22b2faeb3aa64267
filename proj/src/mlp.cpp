// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/mlp.hpp"

#include <cmath>

namespace qsense::mlp {

Network::Network(const MlpSpec& spec, rng::Engine& eng, double lr, double beta1,
                 double beta2, double eps)
    : sizes_(spec.layer_sizes), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (sizes_.size() < 2) throw InvalidSpec("an MLP needs at least input and output layers");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
    if (fan_in < 1 || fan_out < 1) throw InvalidSpec("MLP layer sizes must be positive");
    Layer layer;
    layer.w.resize(fan_out, fan_in);
    const double scale = std::sqrt(2.0 / fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) layer.w(i, j) = scale * eng.normal();
    layer.b = Eigen::VectorXd::Zero(fan_out);
    layer.m_w = Eigen::MatrixXd::Zero(fan_out, fan_in);
    layer.v_w = Eigen::MatrixXd::Zero(fan_out, fan_in);
    layer.m_b = Eigen::VectorXd::Zero(fan_out);
    layer.v_b = Eigen::VectorXd::Zero(fan_out);
    layers_.push_back(std::move(layer));
  }
}

Eigen::MatrixXd Network::logits(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    a = (layers_[l].w * a).colwise() + layers_[l].b;
    if (l + 1 < layers_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

double Network::accuracy(const Eigen::MatrixXd& x, const std::vector<int>& labels) const {
  const Eigen::MatrixXd z = logits(x);
  if (static_cast<int>(labels.size()) != z.cols())
    throw InvalidSpec("label count does not match batch size");
  int correct = 0;
  for (int c = 0; c < z.cols(); ++c) {
    int arg = 0;
    z.col(c).maxCoeff(&arg);
    if (arg == labels[c]) ++correct;
  }
  return static_cast<double>(correct) / z.cols();
}

double Network::train_step(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                           Eigen::MatrixXd* input_grad) {
  const int batch = static_cast<int>(x.cols());
  if (static_cast<int>(labels.size()) != batch)
    throw InvalidSpec("label count does not match batch size");

  // Forward, caching post-activation values.
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].w * acts.back()).colwise() + layers_[l].b;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  // Softmax cross-entropy and its gradient at the output.
  const Eigen::MatrixXd& out = acts.back();
  Eigen::MatrixXd delta(out.rows(), batch);
  double loss = 0.0;
  for (int c = 0; c < batch; ++c) {
    const double zmax = out.col(c).maxCoeff();
    Eigen::VectorXd ez = (out.col(c).array() - zmax).exp();
    const double sum = ez.sum();
    loss -= std::log(ez[labels[c]] / sum);
    delta.col(c) = ez / sum;
    delta(labels[c], c) -= 1.0;
  }
  loss /= batch;
  delta /= batch;

  // Backward with immediate Adam updates.
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  const auto adam = [&](Eigen::Ref<Eigen::MatrixXd> p, Eigen::Ref<Eigen::MatrixXd> m,
                        Eigen::Ref<Eigen::MatrixXd> v, const Eigen::MatrixXd& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p -= lr_ * (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + eps_).matrix());
  };

  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Eigen::MatrixXd grad_w = delta * acts[l].transpose();
    const Eigen::VectorXd grad_b = delta.rowwise().sum();
    Eigen::MatrixXd next_delta;
    if (l > 0 || input_grad) {
      next_delta = layers_[l].w.transpose() * delta;
      if (l > 0) {
        // Rectifier derivative through the cached post-activation values.
        next_delta = (acts[l].array() > 0.0).select(next_delta, 0.0);
      }
    }
    adam(layers_[l].w, layers_[l].m_w, layers_[l].v_w, grad_w);
    layers_[l].m_b = beta1_ * layers_[l].m_b + (1.0 - beta1_) * grad_b;
    layers_[l].v_b = beta2_ * layers_[l].v_b + (1.0 - beta2_) * grad_b.cwiseProduct(grad_b);
    layers_[l].b -=
        lr_ * (layers_[l].m_b / bc1)
                  .cwiseQuotient(((layers_[l].v_b / bc2).cwiseSqrt().array() + eps_).matrix());
    delta.swap(next_delta);
  }
  if (input_grad) *input_grad = delta;
  return loss;
}

}  // namespace qsense::mlp
