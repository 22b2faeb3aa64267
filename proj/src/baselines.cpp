// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qsense/chain.hpp"
#include "qsense/fock.hpp"

namespace qsense::baselines {

namespace {

constexpr std::uint64_t kMlpInitSalt = 0x6d6c7069;
constexpr std::uint64_t kTrainNoiseSalt = 0x626e7472;
constexpr std::uint64_t kTestNoiseSalt = 0x626e7465;

// Noise standard deviation of a squeezed quadrature, variance e^{-2r}/2.
double squeezed_sigma(double r) {
  if (r < 0.0) throw InvalidSpec("squeeze parameter must be >= 0");
  return std::sqrt(0.5 * std::exp(-2.0 * r));
}

std::vector<int> label_ints(const tasks::LabeledDataset& data) {
  std::vector<int> out(data.labels.size());
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    out[i] = static_cast<int>(data.labels[i]);
  return out;
}

// Better of the two readout label assignments for a probability response.
double two_sided_accuracy(const RVec& probs, const tasks::LabeledDataset& data) {
  const double acc = training::accuracy_from_probabilities(probs, data);
  return std::max(acc, 1.0 - acc);
}

}  // namespace

double tms_mean_photons(double r) {
  const double s = std::sinh(r);
  return 2.0 * s * s;
}

double tms_squeezing_db(double r) { return 10.0 * std::log10(std::exp(2.0 * r)); }

// ---------------------------------------------------------------------------
// Cat-state interferometry.

protocol::CircuitParams cat_circuit_params(cplx beta_total) {
  const double unit = protocol::ProtocolConfig{}.beta_magnitude;
  const double mag = std::abs(beta_total);
  const double phase = (mag > 0.0) ? std::arg(beta_total) : 0.0;

  int n_full = static_cast<int>(std::floor(mag / unit + 1e-12));
  double rem = mag - unit * n_full;
  if (rem < 1e-12) rem = 0.0;

  std::vector<double> mags(n_full, unit);
  // A zero-magnitude conditional displacement is a plain qubit swap, not an
  // identity, so the remainder gate exists only when it displaces.
  if (rem > 0.0 || mags.empty()) mags.push_back(rem);

  const int depth = static_cast<int>(mags.size());
  protocol::CircuitParams p;
  p.thetas = RVec::Zero(depth);
  p.phis = RVec::Zero(depth);
  p.ecd_phases = RVec::Zero(depth);
  p.magnitudes = RVec::Zero(depth);
  p.thetas[0] = 0.5;  // pi/2 splitter
  p.phis[0] = 0.5 * kPi;
  for (int i = 0; i < depth; ++i) {
    // Alternating phases make consecutive conditional displacements add.
    p.ecd_phases[i] = phase + (i % 2 == 0 ? 0.0 : kPi);
    p.magnitudes[i] = mags[static_cast<std::size_t>(i)];
  }
  return p;
}

RVec cat_response_batch(cplx beta_total, const std::vector<Displacement>& points,
                        bool ideal) {
  const protocol::CircuitParams params = cat_circuit_params(beta_total);
  protocol::ProtocolConfig cfg;
  cfg.depth_N = params.depth();
  cfg.fidelity = ideal ? protocol::Fidelity::kIdealGate : protocol::Fidelity::kPulseLevel;
  return protocol::run_protocol_batch(points, params, cfg);
}

double cat_response(cplx beta_total, const Displacement& alpha, bool ideal) {
  return cat_response_batch(beta_total, {alpha}, ideal)[0];
}

double cat_fisher_information(double a0, double a1, double f) {
  (void)a0;  // the fringe offset does not enter at the steepest point
  return 4.0 * a1 * a1 * f * f;
}

double cat_fisher_information(const fit::SinusoidFit& fit) {
  return cat_fisher_information(fit.a0, fit.a1, 2.0 * kPi * fit.f);
}

// ---------------------------------------------------------------------------
// Compass-state sensing.

double compass_exact_response(const CompassConfig& cfg, const Displacement& alpha) {
  const cplx a = alpha.value(), b = cfg.beta, bb = cfg.beta_bar;
  const cplx i1(0.0, 1.0);
  const cplx em = std::polar(1.0, -0.25 * kPi);
  const cplx ep = std::polar(1.0, 0.25 * kPi);

  const std::array<cplx, 6> d = {
      (bb + 2.0 * i1 * b + a) * em, (bb - 2.0 * i1 * b + a) * em, (bb + a) * em,
      (bb + 2.0 * b + a) * ep,      (bb - 2.0 * b + a) * ep,      (bb + a) * ep,
  };
  const cplx e = std::exp(0.5 * (a * std::conj(bb) - std::conj(a) * bb));
  const double arg3 =
      (b * std::conj(a) + std::conj(b) * a + b * std::conj(bb) + std::conj(b) * bb).real();
  const double arg6 =
      (-i1 * (b * std::conj(a) - std::conj(b) * a + b * std::conj(bb) - std::conj(b) * bb))
          .real();
  const std::array<cplx, 6> f = {-e,          -e, 2.0 * e * std::cos(arg3),
                                 e,           e,  2.0 * e * std::cos(arg6)};

  cplx p = 0.0;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 6; ++k) {
      const cplx overlap = std::exp(-0.5 * std::norm(d[j]) - 0.5 * std::norm(d[k]) +
                                    std::conj(d[j]) * d[k]);
      p += std::conj(f[j]) * f[k] * overlap;
    }
  return p.real() / 16.0;
}

HybridState compass_target_state(cplx beta, const FockSpec& spec) {
  const cplx i1(0.0, 1.0);
  const Vec cp = coherent_state(beta, spec);
  const Vec cm = coherent_state(-beta, spec);
  const Vec cip = coherent_state(i1 * beta, spec);
  const Vec cim = coherent_state(-i1 * beta, spec);
  const Vec c4e = 0.5 * (cip + cm - cim + cp);
  const Vec c4g = 0.5 * (cip - cm - cim - cp);

  HybridState psi;
  psi.n_fock = spec.n_fock;
  psi.amplitudes = Vec::Zero(2 * spec.n_fock);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  psi.ground() = inv_sqrt2 * c4g;
  psi.excited() = inv_sqrt2 * c4e;
  psi.amplitudes /= psi.amplitudes.norm();
  return psi;
}

namespace {

double compass_mean_split_accuracy(const CompassConfig& cfg,
                                   const tasks::LabeledDataset& data) {
  double sum_a = 0.0, sum_b = 0.0;
  const int na = data.class_count(tasks::Label::kA);
  const int nb = data.class_count(tasks::Label::kB);
  for (int i = 0; i < data.size(); ++i) {
    const double p = compass_exact_response(cfg, data.points[i]);
    (data.labels[static_cast<std::size_t>(i)] == tasks::Label::kA ? sum_a : sum_b) += p;
  }
  const double acc = 0.5 + 0.5 * (sum_a / na - sum_b / nb);
  return std::max(acc, 1.0 - acc);
}

CompassConfig compass_from_raw(const RVec& q) {
  CompassConfig c;
  c.beta = cplx(q[0], q[1]);
  c.beta_bar = cplx(q[2], q[3]);
  return c;
}

// Coarse scan over compass size, orientation, and an offset along the
// compass axis, then pattern-search refinement of all four raw parameters.
CompassConfig compass_optimize(const tasks::LabeledDataset& train,
                               const CompassTrainConfig& cfg) {
  const int g = cfg.grid_size;
  if (g < 1) throw InvalidSpec("grid_size must be >= 1");
  double best_acc = -1.0;
  RVec best_q(4);
  for (int im = 0; im < g; ++im) {
    const double mag = cfg.beta_mag_max * (im + 1) / g;
    for (int ip = 0; ip < g; ++ip) {
      const double ang = 2.0 * kPi * ip / g;
      const cplx beta = std::polar(mag, ang);
      for (int it = 0; it < g; ++it) {
        const double t = -cfg.offset_max + 2.0 * cfg.offset_max * (it + 0.5) / g;
        const cplx bbar = t * std::polar(1.0, ang);
        RVec q(4);
        q << beta.real(), beta.imag(), bbar.real(), bbar.imag();
        const double acc = compass_mean_split_accuracy(compass_from_raw(q), train);
        if (acc > best_acc) {
          best_acc = acc;
          best_q = q;
        }
      }
    }
  }

  double h = std::max(cfg.beta_mag_max, 2.0 * cfg.offset_max) / g;
  for (int iter = 0; iter < cfg.refine_iters; ++iter) {
    bool improved = false;
    for (int c = 0; c < 4; ++c)
      for (const double s : {1.0, -1.0}) {
        RVec q = best_q;
        q[c] += s * h;
        const double acc = compass_mean_split_accuracy(compass_from_raw(q), train);
        if (acc > best_acc + 1e-12) {
          best_acc = acc;
          best_q = q;
          improved = true;
        }
      }
    if (!improved) {
      h *= 0.5;
      if (h < 1e-4) break;
    }
  }
  return compass_from_raw(best_q);
}

}  // namespace

CompassTrainResult compass_exact_train_eval(const tasks::TaskSpec& spec,
                                            const CompassTrainConfig& cfg) {
  const tasks::LabeledDataset train =
      tasks::generate(spec, cfg.train_size, rng::mix(cfg.seed, training::kTrainDataSalt));
  const tasks::LabeledDataset test =
      tasks::generate(spec, cfg.test_size, rng::mix(cfg.seed, training::kTestDataSalt));
  CompassTrainResult res;
  res.cfg = compass_optimize(train, cfg);
  res.train_accuracy = compass_mean_split_accuracy(res.cfg, train);
  res.test_accuracy = compass_mean_split_accuracy(res.cfg, test);
  return res;
}

CompassVariationalResult compass_variational_train_eval(const tasks::TaskSpec& spec,
                                                        const CompassTrainConfig& cfg) {
  const tasks::LabeledDataset train =
      tasks::generate(spec, cfg.train_size, rng::mix(cfg.seed, training::kTrainDataSalt));
  const tasks::LabeledDataset test =
      tasks::generate(spec, cfg.test_size, rng::mix(cfg.seed, training::kTestDataSalt));

  CompassVariationalResult res;
  res.cfg = compass_optimize(train, cfg);

  protocol::ProtocolConfig pcfg;
  pcfg.depth_N = cfg.prep_depth;
  pcfg.fock = cfg.fock;
  const HybridState target = compass_target_state(res.cfg.beta, cfg.fock);
  res.prep = training::train_state_prep(target, cfg.prep_depth, pcfg, cfg.prep,
                                        &res.prep_infidelity);

  // The offset displacement commutes (up to a global phase) with the sensing
  // displacement, so it shifts the evaluation point of the undone circuit.
  const auto eval = [&](const tasks::LabeledDataset& data) {
    std::vector<Displacement> shifted;
    shifted.reserve(static_cast<std::size_t>(data.size()));
    for (const Displacement& d : data.points)
      shifted.push_back(Displacement::from(d.value() + res.cfg.beta_bar));
    chain::Evaluator ev(protocol::eval_options(pcfg, true, chain::GateModel::kIdeal),
                        shifted);
    return two_sided_accuracy(ev.probabilities(res.prep.to_flat()), data);
  };
  res.train_accuracy = eval(train);
  res.test_accuracy = eval(test);
  return res;
}

training::FlatTrainResult cat_train_eval(const tasks::TaskSpec& spec,
                                         const training::TrainConfig& cfg,
                                         const protocol::ProtocolConfig& proto) {
  protocol::ProtocolConfig p1 = proto;
  p1.depth_N = 1;
  const tasks::LabeledDataset train =
      tasks::generate(spec, cfg.train_size, rng::mix(cfg.seed, training::kTrainDataSalt));
  const tasks::LabeledDataset test =
      tasks::generate(spec, cfg.test_size, rng::mix(cfg.seed, training::kTestDataSalt));
  const chain::EvalOptions opts =
      protocol::eval_options(p1, true, chain::GateModel::kIdealPulseSensing);
  return training::train_flat(cfg, opts, train, test);
}

// ---------------------------------------------------------------------------
// Measurement channels.

std::pair<double, double> heterodyne_sample(const Displacement& alpha,
                                            const HeterodyneConfig& cfg,
                                            rng::Engine& eng) {
  if (cfg.n_sys < 1.0) throw InvalidSpec("system noise photon number must be >= 1");
  const double sigma = std::sqrt(0.5 * cfg.n_sys);
  const double gx = sigma * eng.normal();
  const double gp = sigma * eng.normal();
  return {alpha.x + gx, alpha.p + gp};
}

std::pair<double, double> heterodyne_sample(const Displacement& alpha,
                                            const HeterodyneConfig& cfg,
                                            std::uint64_t seed) {
  rng::Engine eng(seed);
  return heterodyne_sample(alpha, cfg, eng);
}

namespace {

void squeezed_features(double value, const SqueezedConfig& cfg,
                       Eigen::Ref<Eigen::VectorXd> out) {
  out.setZero();
  const double u = (value + cfg.scale) / (2.0 * cfg.scale) * cfg.n_bins;
  const int bin = std::clamp(static_cast<int>(std::floor(u)), 0, cfg.n_bins - 1);
  out[bin] = 1.0;
  out[cfg.n_bins] = value;
}

}  // namespace

RVec squeezed_sample(const Displacement& alpha, const SqueezedConfig& cfg,
                     rng::Engine& eng) {
  if (cfg.n_bins < 2 || cfg.scale <= 0.0) throw InvalidSpec("bad squeezed binning");
  const double v = alpha.x * std::cos(cfg.axis_phi) + alpha.p * std::sin(cfg.axis_phi);
  const double noisy = v + squeezed_sigma(cfg.r) * eng.normal();
  RVec out(cfg.n_bins + 1);
  squeezed_features(noisy, cfg, out);
  return out;
}

RVec squeezed_sample(const Displacement& alpha, const SqueezedConfig& cfg,
                     std::uint64_t seed) {
  rng::Engine eng(seed);
  return squeezed_sample(alpha, cfg, eng);
}

std::vector<int> gkp_ion_sample(const Displacement& alpha, const GkpIonConfig& cfg,
                                rng::Engine& eng) {
  GkpIonChannel channel(cfg);
  Eigen::MatrixXd out(channel.feature_size(), 1);
  channel.sample_batch({alpha}, eng, out);
  std::vector<int> bits(static_cast<std::size_t>(out.rows()));
  for (int i = 0; i < out.rows(); ++i) bits[static_cast<std::size_t>(i)] =
      out(i, 0) > 0.5 ? 1 : 0;
  return bits;
}

std::vector<int> gkp_ion_sample(const Displacement& alpha, const GkpIonConfig& cfg,
                                std::uint64_t seed) {
  rng::Engine eng(seed);
  return gkp_ion_sample(alpha, cfg, eng);
}

std::pair<double, double> tms_sample(const Displacement& alpha, const TmsConfig& cfg,
                                     rng::Engine& eng) {
  const double sigma = squeezed_sigma(cfg.r);
  const double gx = sigma * eng.normal();
  const double gp = sigma * eng.normal();
  return {alpha.x + gx, alpha.p + gp};
}

std::pair<double, double> tms_sample(const Displacement& alpha, const TmsConfig& cfg,
                                     std::uint64_t seed) {
  rng::Engine eng(seed);
  return tms_sample(alpha, cfg, eng);
}

// ---------------------------------------------------------------------------
// Channel objects.

MlpSpec BaselineChannel::default_mlp() const {
  return MlpSpec{{feature_size(), 64, 64, 2}};
}

RVec BaselineChannel::param_gradient(const Eigen::MatrixXd& feature_grad) {
  (void)feature_grad;
  return RVec();
}

void NoiselessChannel::sample_batch(const std::vector<Displacement>& points,
                                    rng::Engine& eng, Eigen::MatrixXd& out) {
  (void)eng;
  out.resize(2, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    out(0, static_cast<Eigen::Index>(i)) = points[i].x;
    out(1, static_cast<Eigen::Index>(i)) = points[i].p;
  }
}

HeterodyneChannel::HeterodyneChannel(const HeterodyneConfig& cfg) : cfg_(cfg) {
  if (cfg_.n_sys < 1.0) throw InvalidSpec("system noise photon number must be >= 1");
}

void HeterodyneChannel::sample_batch(const std::vector<Displacement>& points,
                                     rng::Engine& eng, Eigen::MatrixXd& out) {
  out.resize(2, static_cast<Eigen::Index>(points.size()));
  const double sigma = std::sqrt(0.5 * cfg_.n_sys);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out(0, static_cast<Eigen::Index>(i)) = points[i].x + sigma * eng.normal();
    out(1, static_cast<Eigen::Index>(i)) = points[i].p + sigma * eng.normal();
  }
}

SqueezedChannel::SqueezedChannel(const SqueezedConfig& cfg) : cfg_(cfg) {
  if (cfg_.r < 0.0) throw InvalidSpec("squeeze parameter must be >= 0");
  if (cfg_.n_bins < 2 || cfg_.scale <= 0.0) throw InvalidSpec("bad squeezed binning");
}

MlpSpec SqueezedChannel::default_mlp() const {
  return MlpSpec{{cfg_.n_bins + 1, 8, 2}};
}

void SqueezedChannel::sample_batch(const std::vector<Displacement>& points,
                                   rng::Engine& eng, Eigen::MatrixXd& out) {
  last_points_ = points;
  out.resize(cfg_.n_bins + 1, static_cast<Eigen::Index>(points.size()));
  const double sigma = squeezed_sigma(cfg_.r);
  const double cphi = std::cos(cfg_.axis_phi), sphi = std::sin(cfg_.axis_phi);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = points[i].x * cphi + points[i].p * sphi + sigma * eng.normal();
    squeezed_features(v, cfg_, out.col(static_cast<Eigen::Index>(i)));
  }
}

RVec SqueezedChannel::params() const {
  RVec p(1);
  p[0] = cfg_.axis_phi;
  return p;
}

void SqueezedChannel::set_params(const RVec& params) { cfg_.axis_phi = params[0]; }

RVec SqueezedChannel::param_gradient(const Eigen::MatrixXd& feature_grad) {
  // Only the raw-value feature is differentiable in the axis angle; the
  // one-hot block is treated as a constant encoding.
  RVec g = RVec::Zero(1);
  const double cphi = std::cos(cfg_.axis_phi), sphi = std::sin(cfg_.axis_phi);
  for (std::size_t i = 0; i < last_points_.size(); ++i) {
    const double dv = -last_points_[i].x * sphi + last_points_[i].p * cphi;
    g[0] += feature_grad(cfg_.n_bins, static_cast<Eigen::Index>(i)) * dv;
  }
  return g;
}

GkpIonChannel::GkpIonChannel(const GkpIonConfig& cfg) : cfg_(cfg) {
  if (cfg_.eta < 0.0 || cfg_.eta > 1.0) throw InvalidSpec("visibility must be in [0, 1]");
  if (cfg_.rounds < 1) throw InvalidSpec("need at least one measurement round");
  if (cfg_.l_s <= 0.0) throw InvalidSpec("lattice constant must be positive");
  const auto fill = [&](RVec& theta) {
    if (theta.size() == 0) {
      theta = RVec::Zero(cfg_.rounds);
      for (int k = 0; k < cfg_.rounds; ++k) theta[k] = (k % 2) * 0.5 * kPi;
    } else if (theta.size() != cfg_.rounds) {
      throw InvalidSpec("phase offsets must have one entry per round");
    }
  };
  fill(cfg_.theta_x);
  fill(cfg_.theta_p);
}

void GkpIonChannel::sample_batch(const std::vector<Displacement>& points,
                                 rng::Engine& eng, Eigen::MatrixXd& out) {
  last_points_ = points;
  out.resize(2 * cfg_.rounds, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k = 0; k < cfg_.rounds; ++k) {
      const double px =
          0.5 + 0.5 * cfg_.eta * std::cos(points[i].x * cfg_.l_s + cfg_.theta_x[k]);
      const double pp =
          0.5 + 0.5 * cfg_.eta * std::cos(points[i].p * cfg_.l_s + cfg_.theta_p[k]);
      out(2 * k, static_cast<Eigen::Index>(i)) = eng.bernoulli(px) ? 1.0 : 0.0;
      out(2 * k + 1, static_cast<Eigen::Index>(i)) = eng.bernoulli(pp) ? 1.0 : 0.0;
    }
  }
}

RVec GkpIonChannel::params() const {
  RVec p(2 * cfg_.rounds);
  p.head(cfg_.rounds) = cfg_.theta_x;
  p.tail(cfg_.rounds) = cfg_.theta_p;
  return p;
}

void GkpIonChannel::set_params(const RVec& params) {
  cfg_.theta_x = params.head(cfg_.rounds);
  cfg_.theta_p = params.tail(cfg_.rounds);
}

RVec GkpIonChannel::param_gradient(const Eigen::MatrixXd& feature_grad) {
  // Straight-through estimator: the sampled bit passes the gradient of its
  // Bernoulli mean, dP/dtheta = -(eta/2) sin(alpha_q l_s + theta).
  RVec g = RVec::Zero(2 * cfg_.rounds);
  for (std::size_t i = 0; i < last_points_.size(); ++i) {
    for (int k = 0; k < cfg_.rounds; ++k) {
      const double dx =
          -0.5 * cfg_.eta * std::sin(last_points_[i].x * cfg_.l_s + cfg_.theta_x[k]);
      const double dp =
          -0.5 * cfg_.eta * std::sin(last_points_[i].p * cfg_.l_s + cfg_.theta_p[k]);
      g[k] += feature_grad(2 * k, static_cast<Eigen::Index>(i)) * dx;
      g[cfg_.rounds + k] += feature_grad(2 * k + 1, static_cast<Eigen::Index>(i)) * dp;
    }
  }
  return g;
}

TmsChannel::TmsChannel(const TmsConfig& cfg) : cfg_(cfg) {
  if (cfg_.r < 0.0) throw InvalidSpec("squeeze parameter must be >= 0");
}

MlpSpec TmsChannel::default_mlp() const { return MlpSpec{{2, 64, 64, 64, 2}}; }

void TmsChannel::sample_batch(const std::vector<Displacement>& points,
                              rng::Engine& eng, Eigen::MatrixXd& out) {
  out.resize(2, static_cast<Eigen::Index>(points.size()));
  const double sigma = squeezed_sigma(cfg_.r);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out(0, static_cast<Eigen::Index>(i)) = points[i].x + sigma * eng.normal();
    out(1, static_cast<Eigen::Index>(i)) = points[i].p + sigma * eng.normal();
  }
}

// ---------------------------------------------------------------------------
// MLP backend training.

double mlp_train_eval(BaselineChannel& channel, const tasks::LabeledDataset& train,
                      const tasks::LabeledDataset& test, const MlpSpec& spec,
                      const MlpTrainConfig& cfg) {
  if (spec.layer_sizes.size() < 2 ||
      spec.layer_sizes.front() != channel.feature_size() || spec.layer_sizes.back() != 2)
    throw InvalidSpec("backend layer sizes do not match the channel");
  if (cfg.epochs < 1) throw InvalidSpec("need at least one epoch");

  const std::vector<int> y_train = label_ints(train);
  const std::vector<int> y_test = label_ints(test);

  rng::Engine eng_init(rng::mix(cfg.seed, kMlpInitSalt));
  mlp::Network net(spec, eng_init, cfg.lr);
  rng::Engine eng_train(rng::mix(cfg.seed, kTrainNoiseSalt));
  rng::Engine eng_test(rng::mix(cfg.seed, kTestNoiseSalt));

  const int n_channel = channel.n_params();
  training::Adam channel_adam(std::max(n_channel, 1), cfg.channel_lr);
  RVec channel_params = channel.params();

  Eigen::MatrixXd x_train, x_test, input_grad;
  const int window = std::min(cfg.average_window, cfg.epochs);
  double acc_sum = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    channel.sample_batch(train.points, eng_train, x_train);
    net.train_step(x_train, y_train, n_channel > 0 ? &input_grad : nullptr);
    if (n_channel > 0) {
      const RVec g = channel.param_gradient(input_grad);
      channel_adam.step(channel_params, g);
      channel.set_params(channel_params);
    }
    channel.sample_batch(test.points, eng_test, x_test);
    if (epoch >= cfg.epochs - window) acc_sum += net.accuracy(x_test, y_test);
  }
  return acc_sum / window;
}

double mlp_train_eval(BaselineChannel& channel, const tasks::TaskSpec& spec,
                      const MlpSpec& mlp_spec, const MlpTrainConfig& cfg) {
  const tasks::LabeledDataset train =
      tasks::generate(spec, cfg.train_size, rng::mix(cfg.seed, training::kTrainDataSalt));
  const tasks::LabeledDataset test =
      tasks::generate(spec, cfg.test_size, rng::mix(cfg.seed, training::kTestDataSalt));
  return mlp_train_eval(channel, train, test, mlp_spec, cfg);
}

double squeezed_axis_init(const tasks::LabeledDataset& data, int n_angles) {
  if (n_angles < 1) throw InvalidSpec("need at least one candidate angle");
  double best_phi = 0.0, best_ratio = -1.0;
  for (int k = 0; k < n_angles; ++k) {
    const double phi = kPi * k / n_angles;  // axes repeat modulo pi
    const double c = std::cos(phi), s = std::sin(phi);
    double mean[2] = {0.0, 0.0}, sq[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    for (int i = 0; i < data.size(); ++i) {
      const double v = data.points[static_cast<std::size_t>(i)].x * c +
                       data.points[static_cast<std::size_t>(i)].p * s;
      const int cls = static_cast<int>(data.labels[static_cast<std::size_t>(i)]);
      mean[cls] += v;
      sq[cls] += v * v;
      ++count[cls];
    }
    for (int cls = 0; cls < 2; ++cls) {
      mean[cls] /= std::max(count[cls], 1);
      sq[cls] = sq[cls] / std::max(count[cls], 1) - mean[cls] * mean[cls];
    }
    const double gap = mean[0] - mean[1];
    const double ratio = gap * gap / (sq[0] + sq[1] + 1e-12);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_phi = phi;
    }
  }
  return best_phi;
}

}  // namespace qsense::baselines
