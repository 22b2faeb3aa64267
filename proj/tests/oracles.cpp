// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "qsense/chain.hpp"
#include "qsense/fock.hpp"

namespace qsense::oracle {

namespace {

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

Mat annihilation(int n_fock) {
  Mat a = Mat::Zero(n_fock, n_fock);
  for (int m = 1; m < n_fock; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

}  // namespace

Mat matrix_exp(const Mat& a) { return a.exp(); }

Mat displacement_pade(cplx alpha, int n_fock) {
  const Mat a = annihilation(n_fock);
  const Mat gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return matrix_exp(gen);
}

Eigen::Matrix2cd rotation_2x2(double theta, double phi) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Eigen::Matrix2cd r;
  r(0, 0) = c;
  r(0, 1) = cplx(0.0, 1.0) * s * expi(-phi);
  r(1, 0) = cplx(0.0, 1.0) * s * expi(phi);
  r(1, 1) = c;
  return r;
}

Mat embed_qubit(const Eigen::Matrix2cd& q, int n_fock) {
  Mat op = Mat::Zero(2 * n_fock, 2 * n_fock);
  const Mat id = Mat::Identity(n_fock, n_fock);
  op.block(0, 0, n_fock, n_fock) = q(0, 0) * id;
  op.block(0, n_fock, n_fock, n_fock) = q(0, 1) * id;
  op.block(n_fock, 0, n_fock, n_fock) = q(1, 0) * id;
  op.block(n_fock, n_fock, n_fock, n_fock) = q(1, 1) * id;
  return op;
}

Mat embed_conditional(const Mat& og, const Mat& oe) {
  const int n = static_cast<int>(og.rows());
  Mat op = Mat::Zero(2 * n, 2 * n);
  op.block(0, 0, n, n) = og;
  op.block(n, n, n, n) = oe;
  return op;
}

Mat ecd_dense(cplx beta, int n_fock) {
  Mat op = Mat::Zero(2 * n_fock, 2 * n_fock);
  op.block(0, n_fock, n_fock, n_fock) = displacement_pade(beta / 2.0, n_fock);
  op.block(n_fock, 0, n_fock, n_fock) = displacement_pade(-beta / 2.0, n_fock);
  return op;
}

double dense_protocol_probability(const Displacement& alpha,
                                  const protocol::CircuitParams& params,
                                  const protocol::ProtocolConfig& cfg,
                                  chain::GateModel model) {
  const int n = cfg.fock.n_fock;
  const int depth = params.depth();
  const auto mag = [&](int i) {
    return params.has_magnitudes() ? params.magnitudes[i] : cfg.beta_magnitude;
  };

  Vec psi = Vec::Zero(2 * n);
  psi[0] = 1.0;

  if (model == chain::GateModel::kPulse) {
    std::vector<Mat> rot(depth), ecd(depth);
    for (int i = 0; i < depth; ++i) {
      rot[i] = pulse::trotterized_rotation(kPi * params.thetas[i], params.phis[i],
                                           cfg.phys, cfg.fock, cfg.trotter_steps);
      ecd[i] = pulse::ecd_pulse_unitary(params.ecd_phases[i], mag(i), cfg.phys,
                                        cfg.fock, {})
                   .op;
    }
    for (int i = 0; i < depth; ++i) psi = ecd[i] * (rot[i] * psi);
    psi = pulse::sensing_pulse(alpha, cfg.phys, cfg.fock, {}) * psi;
    // Inverse stage: the same composite pulses replayed (the composite is
    // Hermitian), rotations as forward pulses with the drive phase advanced
    // by pi, then the final rotation applied forward.
    for (int i = depth - 1; i >= 0; --i) {
      psi = ecd[i] * psi;
      psi = pulse::trotterized_rotation(kPi * params.thetas[i], params.phis[i] + kPi,
                                        cfg.phys, cfg.fock, cfg.trotter_steps) *
            psi;
    }
    psi = pulse::trotterized_rotation(kPi * params.final_theta, params.final_phi,
                                      cfg.phys, cfg.fock, cfg.trotter_steps) *
          psi;
    return psi.tail(n).squaredNorm();
  }

  Mat u = Mat::Identity(2 * n, 2 * n);
  for (int i = 0; i < depth; ++i) {
    const Mat rot = embed_qubit(rotation_2x2(kPi * params.thetas[i], params.phis[i]), n);
    const Mat ecd = ecd_dense(mag(i) * expi(params.ecd_phases[i]), n);
    u = ecd * rot * u;
  }
  const Mat sensing = model == chain::GateModel::kIdeal
                          ? embed_conditional(displacement_pade(alpha.value(), n),
                                              displacement_pade(alpha.value(), n))
                          : pulse::sensing_pulse(alpha, cfg.phys, cfg.fock, {});
  const Mat final_rot =
      embed_qubit(rotation_2x2(kPi * params.final_theta, params.final_phi), n);
  psi = final_rot * (u.adjoint() * (sensing * (u * psi)));
  return psi.tail(n).squaredNorm();
}

ReferenceIntegrals reference_integrals(const pulse::Waveform& w, double chi,
                                       int panels) {
  ReferenceIntegrals out;
  const double h = w.duration / panels;
  const auto g1 = [&](double t) { return w.sample(t) * expi(+0.5 * chi * t); };
  const auto simpson = [&](auto&& fn, double a, double b) {
    return (b - a) / 6.0 * (fn(a) + 4.0 * fn(0.5 * (a + b)) + fn(b));
  };
  cplx i1_cum(0.0, 0.0);
  for (int k = 0; k < panels; ++k) {
    const double t0 = k * h, tm = t0 + 0.5 * h, t1 = t0 + h;
    // I1 values inside the panel, each from a half-panel Simpson rule.
    const cplx i1_mid = i1_cum + simpson(g1, t0, tm);
    const cplx i1_right = i1_mid + simpson(g1, tm, t1);
    const auto g2v = [&](double t, const cplx& i1t) {
      return w.sample(t) * i1t * expi(-0.5 * chi * t);
    };
    out.i2 += h / 6.0 * (g2v(t0, i1_cum) + 4.0 * g2v(tm, i1_mid) + g2v(t1, i1_right));
    out.f_total += simpson([&](double t) { return w.sample(t); }, t0, t1);
    i1_cum = i1_right;
  }
  out.i1 = i1_cum;
  return out;
}

FrameState integrate_frame_rk4(const std::function<cplx(double)>& eps, double chi,
                               cplx init_g, cplx init_e, double duration, int steps) {
  struct Deriv {
    cplx dg, de;
    double dpg, dpe;
  };
  const auto rhs = [&](double t, const FrameState& s) {
    const cplx e = eps(t);
    Deriv d;
    d.dg = cplx(0.0, -0.5 * chi) * s.alpha_g - cplx(0.0, 1.0) * e;
    d.de = cplx(0.0, +0.5 * chi) * s.alpha_e - cplx(0.0, 1.0) * e;
    d.dpg = (std::conj(e) * s.alpha_g).real();
    d.dpe = (std::conj(e) * s.alpha_e).real();
    return d;
  };
  const auto advance = [](const FrameState& s, const Deriv& d, double h) {
    FrameState r;
    r.alpha_g = s.alpha_g + h * d.dg;
    r.alpha_e = s.alpha_e + h * d.de;
    r.phi_g = s.phi_g + h * d.dpg;
    r.phi_e = s.phi_e + h * d.dpe;
    return r;
  };
  FrameState s{init_g, init_e, 0.0, 0.0};
  const double h = duration / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Deriv k1 = rhs(t, s);
    const Deriv k2 = rhs(t + 0.5 * h, advance(s, k1, 0.5 * h));
    const Deriv k3 = rhs(t + 0.5 * h, advance(s, k2, 0.5 * h));
    const Deriv k4 = rhs(t + h, advance(s, k3, h));
    s.alpha_g += h / 6.0 * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
    s.alpha_e += h / 6.0 * (k1.de + 2.0 * k2.de + 2.0 * k3.de + k4.de);
    s.phi_g += h / 6.0 * (k1.dpg + 2.0 * k2.dpg + 2.0 * k3.dpg + k4.dpg);
    s.phi_e += h / 6.0 * (k1.dpe + 2.0 * k2.dpe + 2.0 * k3.dpe + k4.dpe);
  }
  return s;
}

double compass_fock_probability(cplx beta, cplx beta_bar, cplx alpha, int n_fock) {
  const int n = n_fock;
  const Mat id = Mat::Identity(n, n);
  const auto dc = [&](cplx b) { return embed_conditional(id, displacement_pade(b, n)); };

  Eigen::Matrix2cd sy;
  sy << cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 1.0), cplx(0.0, 0.0);
  const Eigen::Matrix2cd rh =
      (Eigen::Matrix2cd::Identity() + cplx(0.0, 1.0) * sy) / std::sqrt(2.0);
  const Eigen::Matrix2cd rpi = cplx(0.0, 1.0) * sy;

  // Rc(phi) = exp(i phi sx n): diagonal in the sx eigenbasis reached by the
  // Hadamard-like mixer.
  const auto rc = [&](double phi) {
    Eigen::Matrix2cd hx;
    hx << 1.0, 1.0, 1.0, -1.0;
    hx /= std::sqrt(2.0);
    Vec plus(n), minus(n);
    for (int m = 0; m < n; ++m) {
      plus[m] = expi(+phi * m);
      minus[m] = expi(-phi * m);
    }
    return embed_qubit(hx, n) *
           embed_conditional(Mat(plus.asDiagonal()), Mat(minus.asDiagonal())) *
           embed_qubit(hx, n);
  };

  const Mat u = embed_qubit(rh, n) * dc(cplx(0.0, -1.0) * beta) * embed_qubit(rpi, n) *
                dc(-beta) * embed_qubit(rh, n) * rc(kPi / 4.0) *
                dc(2.0 * beta * expi(kPi / 4.0)) * embed_qubit(rh, n);

  Vec psi = Vec::Zero(2 * n);
  psi[0] = 1.0;
  psi = u * psi;
  const Mat d_sense = displacement_pade(alpha, n) * displacement_pade(beta_bar, n);
  psi = embed_conditional(d_sense, d_sense) * psi;
  psi = u.adjoint() * psi;
  return psi.head(n).squaredNorm();
}

double ramsey_fock_probability(double alpha, double chi, double t, int n_fock) {
  const int n = n_fock;
  Vec psi = Vec::Zero(2 * n);
  psi.head(n) = displacement_pade(cplx(alpha, 0.0), n).col(0);
  const Mat half = embed_qubit(rotation_2x2(kPi / 2.0, kPi / 2.0), n);
  Vec disp_g(n), disp_e(n);
  for (int m = 0; m < n; ++m) {
    disp_g[m] = expi(-0.5 * chi * t * m);
    disp_e[m] = std::conj(disp_g[m]);
  }
  psi = half * psi;
  psi.head(n) = disp_g.asDiagonal() * psi.head(n);
  psi.tail(n) = disp_e.asDiagonal() * psi.tail(n);
  psi = half * psi;
  return psi.tail(n).squaredNorm();
}

RVec finite_difference(const std::function<double(const RVec&)>& f, const RVec& x,
                       double h) {
  RVec g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    RVec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

bool linearly_separable(const tasks::LabeledDataset& data, int n_angles) {
  for (int k = 0; k < n_angles; ++k) {
    const double th = kPi * k / n_angles;
    const double cx = std::cos(th), cp = std::sin(th);
    double max_a = -1e300, min_a = 1e300, max_b = -1e300, min_b = 1e300;
    for (int i = 0; i < data.size(); ++i) {
      const double v = cx * data.points[i].x + cp * data.points[i].p;
      if (data.labels[i] == tasks::Label::kA) {
        max_a = std::max(max_a, v);
        min_a = std::min(min_a, v);
      } else {
        max_b = std::max(max_b, v);
        min_b = std::min(min_b, v);
      }
    }
    if (max_a < min_b || max_b < min_a) return true;
  }
  return false;
}

}  // namespace qsense::oracle
