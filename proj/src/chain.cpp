// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/chain.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qsense::chain {

namespace {

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// ---------------------------------------------------------------------------
// Parameter layout
// ---------------------------------------------------------------------------

struct Unpacked {
  RVec amps, phis, ecd_phis, mags;
  double amp_f = 0.0, phi_f = 0.0;
  bool has_final = false;
  bool has_mags = false;
};

Unpacked unpack(const RVec& p, Ansatz ansatz, int depth) {
  Unpacked u;
  const int n = depth;
  if (p.size() != n_params(ansatz, depth)) throw InvalidSpec("parameter vector has wrong size");
  u.amps = p.segment(0, n);
  u.phis = p.segment(n, n);
  u.ecd_phis = p.segment(2 * n, n);
  switch (ansatz) {
    case Ansatz::kProtocol:
      u.amp_f = p[3 * n];
      u.phi_f = p[3 * n + 1];
      u.has_final = true;
      break;
    case Ansatz::kTrainableMag:
      u.mags = p.segment(3 * n, n);
      u.has_mags = true;
      u.amp_f = p[4 * n];
      u.phi_f = p[4 * n + 1];
      u.has_final = true;
      break;
    case Ansatz::kStatePrep:
      u.mags = p.segment(3 * n, n);
      u.has_mags = true;
      break;
  }
  return u;
}

struct ParamIndex {
  int amp(int i) const { return i; }
  int phi(int i) const { return depth + i; }
  int ecd_phi(int i) const { return 2 * depth + i; }
  int mag(int i) const { return 3 * depth + i; }  // trainable-mag ansatz only
  int amp_f() const { return has_mags ? 4 * depth : 3 * depth; }
  int phi_f() const { return amp_f() + 1; }
  int depth;
  bool has_mags;
};

// ---------------------------------------------------------------------------
// Small gate helpers
// ---------------------------------------------------------------------------

struct RotMats {
  Eigen::Matrix2cd r, dth, dph;
};

RotMats rotation_with_grads(double theta, double phi) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const cplx em = std::polar(1.0, -phi), ep = std::polar(1.0, phi);
  RotMats m;
  m.r << c, cplx(0, 1) * s * em, cplx(0, 1) * s * ep, c;
  m.dth << -0.5 * s, cplx(0, 0.5) * c * em, cplx(0, 0.5) * c * ep, -0.5 * s;
  m.dph << 0.0, s * em, -s * ep, 0.0;
  return m;
}

// out = R * in on the qubit index of a (g, e) pair of blocks.
template <typename TIn, typename TOut>
void mix_qubit(const Eigen::Matrix2cd& r, const TIn& gi, const TIn& ei, TOut& go, TOut& eo) {
  go = r(0, 0) * gi + r(0, 1) * ei;
  eo = r(1, 0) * gi + r(1, 1) * ei;
}

Vec number_phases(int n, double angle) {  // e^{-i angle k}
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = expi(-angle * k);
  return v;
}

Vec direction_phases(int n, double phi) {  // e^{+i phi k}
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = expi(phi * k);
  return v;
}

// Y = (e^{i phi} a^dag - e^{-i phi} a) / 2 applied to a block: the magnitude
// generator of an ECD branch.
Mat apply_mag_generator(double phi, const Eigen::Ref<const Mat>& x) {
  const int n = static_cast<int>(x.rows());
  Mat y = Mat::Zero(n, x.cols());
  const cplx ep = 0.5 * std::polar(1.0, phi);
  const cplx em = 0.5 * std::polar(1.0, -phi);
  for (int m = 0; m + 1 < n; ++m) {
    const double rt = std::sqrt(static_cast<double>(m + 1));
    y.row(m + 1) += ep * rt * x.row(m);  // a^dag part
    y.row(m) -= em * rt * x.row(m + 1);  // a part
  }
  return y;
}

cplx number_weighted_sum(const Mat& lam, const Mat& psi) {
  // sum over sectors/columns of <lam| n |psi>, elementwise.
  cplx acc(0, 0);
  const int n = static_cast<int>(lam.rows());
  for (int m = 1; m < n; ++m)
    acc += static_cast<double>(m) * lam.row(m).conjugate().cwiseProduct(psi.row(m)).sum();
  return acc;
}

}  // namespace

int n_params(Ansatz ansatz, int depth) {
  switch (ansatz) {
    case Ansatz::kProtocol: return 3 * depth + 2;
    case Ansatz::kTrainableMag: return 4 * depth + 2;
    case Ansatz::kStatePrep: return 4 * depth;
  }
  return 0;
}

std::vector<int> amplitude_indices(Ansatz ansatz, int depth) {
  std::vector<int> idx;
  for (int i = 0; i < depth; ++i) idx.push_back(i);
  if (ansatz != Ansatz::kStatePrep)
    idx.push_back(ansatz == Ansatz::kTrainableMag ? 4 * depth : 3 * depth);
  return idx;
}

// ---------------------------------------------------------------------------
// Sensing cache: per data point, the residual M(alpha) = D^dag(alpha)
// S(alpha) of the pulse-level sensing model (two diagonal qubit blocks), and
// for the full pulse model additionally the eigensystem of
// K(alpha) = n + alpha a^dag + conj(alpha) a + |alpha|^2
// used to conjugate the dispersive factors of inverse-stage rotations.
// ---------------------------------------------------------------------------

struct Evaluator::SensingCache {
  std::vector<pulse::PulseBlock> mg, me;  // per point (empty at kIdeal)
  std::vector<Mat> kvecs;                 // per point, kPulse only
  std::vector<RVec> kvals;
};

void Evaluator::ensure_sensing_cache() const {
  if (sensing_) return;
  auto cache = std::make_shared<SensingCache>();
  const int npts = static_cast<int>(points_.size());
  if (opts_.model != GateModel::kIdeal) {
    cache->mg.resize(npts);
    cache->me.resize(npts);
    for (int i = 0; i < npts; ++i) {
      const cplx alpha = points_[i].value();
      const pulse::SensingPulse sp = pulse::sensing_pulse_blocks(points_[i], opts_.phys, {});
      // M_j = D^dag(alpha) S_j = c_j e^{-i Im(alpha conj(d_j))} D(d_j - alpha)
      //        e^{-i omega_j n}.
      const cplx dg = sp.g.d_left, de = sp.e.d_left;
      cache->mg[i] = pulse::PulseBlock{
          sp.g.c * expi(-std::imag(alpha * std::conj(dg))), dg - alpha, sp.g.omega, {0.0, 0.0}};
      cache->me[i] = pulse::PulseBlock{
          sp.e.c * expi(-std::imag(alpha * std::conj(de))), de - alpha, sp.e.omega, {0.0, 0.0}};
    }
  }
  if (opts_.model == GateModel::kPulse) {
    const int n = opts_.fock.n_fock;
    const Mat a = build_annihilation(opts_.fock);
    cache->kvecs.resize(npts);
    cache->kvals.resize(npts);
    for (int i = 0; i < npts; ++i) {
      const cplx alpha = points_[i].value();
      Mat k = alpha * a.adjoint() + std::conj(alpha) * a;
      for (int m = 0; m < n; ++m) k(m, m) += m + std::norm(alpha);
      Eigen::SelfAdjointEigenSolver<Mat> es(k);
      cache->kvecs[i] = es.eigenvectors();
      cache->kvals[i] = es.eigenvalues();
    }
  }
  sensing_ = std::move(cache);
}

// ---------------------------------------------------------------------------

Evaluator::Evaluator(EvalOptions opts, std::vector<Displacement> points)
    : opts_(opts), points_(std::move(points)) {
  if (opts_.depth < 1) throw InvalidSpec("circuit depth must be >= 1");
  if (opts_.ansatz == Ansatz::kStatePrep)
    throw InvalidSpec("state-prep ansatz has no sensing stage; use StatePrepEvaluator");
  if (opts_.ansatz == Ansatz::kProtocol)
    d_half_ = DisplacementFactors::get(opts_.fock).build(opts_.beta_mag / 2.0);
}

namespace {

// Forward record for the ideal-gate models.  U-stage slots hold single
// columns (the pre-sensing state is data independent); the inverse stage is
// batched over data points.
struct ForwardRec {
  std::vector<Vec> ug, ue;  // 2N+1 single-column slots
  std::vector<Mat> bg, be;  // sensing output, 2N inverse-stage slots, final
};

}  // namespace

RVec Evaluator::probabilities(const RVec& params) const {
  ensure_sensing_cache();
  const Unpacked u = unpack(params, opts_.ansatz, opts_.depth);
  const int n = opts_.fock.n_fock;
  const int npts = static_cast<int>(points_.size());
  const int nl = opts_.depth;
  const auto& fac = DisplacementFactors::get(opts_.fock);

  if (opts_.model != GateModel::kPulse) {
    // ---- U stage on a single column ----
    Vec g = Vec::Zero(n), e = Vec::Zero(n);
    g[0] = 1.0;
    for (int i = 0; i < nl; ++i) {
      const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
      Vec g2, e2;
      mix_qubit(rm.r, g, e, g2, e2);
      const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
      const cplx half_arg = 0.5 * mag * std::polar(1.0, u.ecd_phis[i]);
      Mat tmp;
      if (opts_.ansatz == Ansatz::kProtocol) {
        const Vec dir = direction_phases(n, u.ecd_phis[i]);
        Vec e2s = dir.conjugate().asDiagonal() * e2;
        Vec g2s = dir.conjugate().asDiagonal() * g2;
        g = dir.asDiagonal() * (d_half_ * e2s);
        e = dir.asDiagonal() * (d_half_.adjoint() * g2s);
      } else {
        fac.apply(half_arg, e2, tmp);
        g = tmp.col(0);
        fac.apply(-half_arg, g2, tmp);
        e = tmp.col(0);
      }
    }

    // ---- sensing ----
    Mat bg(n, npts), be(n, npts);
    if (opts_.model == GateModel::kIdeal) {
      bg = g.replicate(1, npts);
      be = e.replicate(1, npts);
    } else {
      Mat out;
      for (int c = 0; c < npts; ++c) {
        sensing_->mg[c].apply(opts_.fock, g, out);
        bg.col(c) = out.col(0);
        sensing_->me[c].apply(opts_.fock, e, out);
        be.col(c) = out.col(0);
      }
    }

    // ---- inverse stage with phase kicks, batched ----
    for (int i = nl - 1; i >= 0; --i) {
      const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
      const cplx beta = mag * std::polar(1.0, u.ecd_phis[i]);
      Vec kick_g(npts), kick_e(npts);
      for (int c = 0; c < npts; ++c) {
        const double gamma = std::imag(points_[c].value() * std::conj(beta));
        kick_g[c] = expi(-gamma);
        kick_e[c] = expi(gamma);
      }
      Mat g2(n, npts), e2(n, npts);
      if (opts_.ansatz == Ansatz::kProtocol) {
        const Vec dir = direction_phases(n, u.ecd_phis[i]);
        g2 = dir.asDiagonal() * (d_half_ * (dir.conjugate().asDiagonal() * be));
        e2 = dir.asDiagonal() * (d_half_.adjoint() * (dir.conjugate().asDiagonal() * bg));
      } else {
        const cplx half_arg = 0.5 * beta;
        fac.apply(half_arg, be, g2);
        fac.apply(-half_arg, bg, e2);
      }
      bg = g2 * kick_g.asDiagonal();
      be = e2 * kick_e.asDiagonal();
      const RotMats rm = rotation_with_grads(-kPi * u.amps[i], u.phis[i]);
      Mat g3, e3;
      mix_qubit(rm.r, bg, be, g3, e3);
      bg.swap(g3);
      be.swap(e3);
    }

    if (u.has_final) {
      const RotMats rm = rotation_with_grads(kPi * u.amp_f, u.phi_f);
      Mat g3, e3;
      mix_qubit(rm.r, bg, be, g3, e3);
      bg.swap(g3);
      be.swap(e3);
    }

    RVec p(npts);
    for (int c = 0; c < npts; ++c) p[c] = be.col(c).squaredNorm();
    return p;
  }

  // ---- full pulse model (probabilities only) ----
  // U stage on a single column with pulse gates.
  Vec g = Vec::Zero(n), e = Vec::Zero(n);
  g[0] = 1.0;
  std::vector<pulse::EcdPulse> ecd_gates;
  ecd_gates.reserve(nl);
  for (int i = 0; i < nl; ++i) {
    const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
    ecd_gates.push_back(pulse::ecd_pulse(u.ecd_phis[i], mag, opts_.phys, {}));
  }
  const double rot_disp = 0.5 * opts_.phys.chi * opts_.phys.rot_duration / opts_.trotter_steps;
  const Vec disp_g = number_phases(n, rot_disp);
  const Vec disp_e = disp_g.conjugate();
  const auto apply_trotter_rot = [&](double theta, double phi, Vec& gg, Vec& ee) {
    const pulse::TrotterRotation tr =
        pulse::trotter_rotation_steps(theta, phi, opts_.phys, opts_.trotter_steps);
    for (const auto& q : tr.qubit_steps) {
      Vec g2, e2;
      mix_qubit(q, gg, ee, g2, e2);
      gg = disp_g.asDiagonal() * g2;
      ee = disp_e.asDiagonal() * e2;
    }
  };
  for (int i = 0; i < nl; ++i) {
    apply_trotter_rot(kPi * u.amps[i], u.phis[i], g, e);
    Mat out;
    Vec gp = g;
    ecd_gates[i].ge.apply(opts_.fock, e, out);
    g = out.col(0);
    ecd_gates[i].eg.apply(opts_.fock, gp, out);
    e = out.col(0);
  }

  RVec p(npts);
  for (int c = 0; c < npts; ++c) {
    // sensing residual
    Mat out;
    Vec cg, ce;
    sensing_->mg[c].apply(opts_.fock, g, out);
    cg = out.col(0);
    sensing_->me[c].apply(opts_.fock, e, out);
    ce = out.col(0);
    const cplx alpha = points_[c].value();
    const Mat& kv = sensing_->kvecs[c];
    const RVec& kl = sensing_->kvals[c];
    const auto apply_conj_trotter_rot = [&](double theta, double phi, Vec& gg, Vec& ee) {
      const pulse::TrotterRotation tr =
          pulse::trotter_rotation_steps(theta, phi, opts_.phys, opts_.trotter_steps);
      for (const auto& q : tr.qubit_steps) {
        Vec g2, e2;
        mix_qubit(q, gg, ee, g2, e2);
        // dispersive factor conjugated by D(alpha): phases of K(alpha)
        Vec wg = kv.adjoint() * g2;
        Vec we = kv.adjoint() * e2;
        for (int m = 0; m < n; ++m) {
          const cplx ph = expi(-rot_disp * kl[m]);
          wg[m] *= ph;
          we[m] *= std::conj(ph);
        }
        gg = kv * wg;
        ee = kv * we;
      }
    };
    // inverse stage: replayed ECD pulses (conjugated), inverse rotations.
    for (int i = nl - 1; i >= 0; --i) {
      const pulse::EcdPulse& ec = ecd_gates[i];
      const cplx kick_ge = expi(-2.0 * std::imag(alpha * std::conj(ec.ge.d_left)));
      const cplx kick_eg = expi(-2.0 * std::imag(alpha * std::conj(ec.eg.d_left)));
      Mat out2;
      Vec cgp = cg;
      ec.ge.apply(opts_.fock, ce, out2);
      cg = kick_ge * out2.col(0);
      ec.eg.apply(opts_.fock, cgp, out2);
      ce = kick_eg * out2.col(0);
      apply_conj_trotter_rot(kPi * u.amps[i], u.phis[i] + kPi, cg, ce);
    }
    if (u.has_final) apply_conj_trotter_rot(kPi * u.amp_f, u.phi_f, cg, ce);
    p[c] = ce.squaredNorm();
  }
  return p;
}

RVec Evaluator::weighted_gradient(const RVec& params, const RVec& weights,
                                  RVec* probs) const {
  if (opts_.model == GateModel::kPulse)
    throw InvalidSpec("gradients are available for the ideal-gate models only");
  ensure_sensing_cache();
  const Unpacked u = unpack(params, opts_.ansatz, opts_.depth);
  const ParamIndex ix{opts_.depth, u.has_mags};
  const int n = opts_.fock.n_fock;
  const int npts = static_cast<int>(points_.size());
  const int nl = opts_.depth;
  const auto& fac = DisplacementFactors::get(opts_.fock);
  if (weights.size() != npts) throw InvalidSpec("weight vector size mismatch");

  // ---------------- forward with slot recording ----------------
  ForwardRec rec;
  rec.ug.resize(2 * nl + 1);
  rec.ue.resize(2 * nl + 1);
  rec.ug[0] = Vec::Zero(n);
  rec.ue[0] = Vec::Zero(n);
  rec.ug[0][0] = 1.0;

  const auto ecd_apply_cols = [&](int i, const Mat& gin, const Mat& ein, Mat& gout,
                                  Mat& eout) {
    const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
    if (opts_.ansatz == Ansatz::kProtocol) {
      const Vec dir = direction_phases(n, u.ecd_phis[i]);
      gout = dir.asDiagonal() * (d_half_ * (dir.conjugate().asDiagonal() * ein));
      eout = dir.asDiagonal() * (d_half_.adjoint() * (dir.conjugate().asDiagonal() * gin));
    } else {
      const cplx half_arg = 0.5 * mag * std::polar(1.0, u.ecd_phis[i]);
      fac.apply(half_arg, ein, gout);
      fac.apply(-half_arg, gin, eout);
    }
  };

  for (int i = 0; i < nl; ++i) {
    const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
    mix_qubit(rm.r, rec.ug[2 * i], rec.ue[2 * i], rec.ug[2 * i + 1], rec.ue[2 * i + 1]);
    Mat go, eo;
    ecd_apply_cols(i, rec.ug[2 * i + 1], rec.ue[2 * i + 1], go, eo);
    rec.ug[2 * i + 2] = go.col(0);
    rec.ue[2 * i + 2] = eo.col(0);
  }

  const int nbatch = 2 * nl + (u.has_final ? 2 : 1);
  rec.bg.resize(nbatch);
  rec.be.resize(nbatch);
  if (opts_.model == GateModel::kIdeal) {
    rec.bg[0] = rec.ug[2 * nl].replicate(1, npts);
    rec.be[0] = rec.ue[2 * nl].replicate(1, npts);
  } else {
    rec.bg[0].resize(n, npts);
    rec.be[0].resize(n, npts);
    Mat out;
    for (int c = 0; c < npts; ++c) {
      sensing_->mg[c].apply(opts_.fock, rec.ug[2 * nl], out);
      rec.bg[0].col(c) = out.col(0);
      sensing_->me[c].apply(opts_.fock, rec.ue[2 * nl], out);
      rec.be[0].col(c) = out.col(0);
    }
  }

  std::vector<Vec> kick_g(nl), kick_e(nl);
  for (int i = 0; i < nl; ++i) {
    const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
    const cplx beta = mag * std::polar(1.0, u.ecd_phis[i]);
    kick_g[i].resize(npts);
    kick_e[i].resize(npts);
    for (int c = 0; c < npts; ++c) {
      const double gamma = std::imag(points_[c].value() * std::conj(beta));
      kick_g[i][c] = expi(-gamma);
      kick_e[i][c] = expi(gamma);
    }
  }

  int t = 0;
  for (int i = nl - 1; i >= 0; --i) {
    Mat go, eo;
    ecd_apply_cols(i, rec.bg[t], rec.be[t], go, eo);
    rec.bg[t + 1] = go * kick_g[i].asDiagonal();
    rec.be[t + 1] = eo * kick_e[i].asDiagonal();
    const RotMats rm = rotation_with_grads(-kPi * u.amps[i], u.phis[i]);
    mix_qubit(rm.r, rec.bg[t + 1], rec.be[t + 1], rec.bg[t + 2], rec.be[t + 2]);
    t += 2;
  }
  if (u.has_final) {
    const RotMats rm = rotation_with_grads(kPi * u.amp_f, u.phi_f);
    mix_qubit(rm.r, rec.bg[t], rec.be[t], rec.bg[t + 1], rec.be[t + 1]);
    ++t;
  }

  if (probs) {
    probs->resize(npts);
    for (int c = 0; c < npts; ++c) (*probs)[c] = rec.be[t].col(c).squaredNorm();
  }

  // ---------------- adjoint sweep ----------------
  RVec grad = RVec::Zero(n_params());
  // Costate for L = sum_c w_c p_c: lambda = w_c * P_e psi.
  Mat lg = Mat::Zero(n, npts);
  Mat le = rec.be[t] * weights.asDiagonal();

  // 2 Re sum dR_xy * S_xy for a rotation at batched slots.
  const auto rot_sums = [&](const Eigen::Matrix2cd& dm, const Mat& lgv, const Mat& lev,
                            const Mat& gin, const Mat& ein) -> double {
    const cplx sgg = lgv.conjugate().cwiseProduct(gin).sum();
    const cplx sge = lgv.conjugate().cwiseProduct(ein).sum();
    const cplx seg = lev.conjugate().cwiseProduct(gin).sum();
    const cplx see = lev.conjugate().cwiseProduct(ein).sum();
    return 2.0 * (dm(0, 0) * sgg + dm(0, 1) * sge + dm(1, 0) * seg + dm(1, 1) * see).real();
  };
  const auto back_rotation = [&](const Eigen::Matrix2cd& r, Mat& lgv, Mat& lev) {
    Mat g2, e2;
    mix_qubit(Eigen::Matrix2cd(r.adjoint()), lgv, lev, g2, e2);
    lgv.swap(g2);
    lev.swap(e2);
  };

  if (u.has_final) {
    const RotMats rm = rotation_with_grads(kPi * u.amp_f, u.phi_f);
    grad[ix.amp_f()] += kPi * rot_sums(rm.dth, lg, le, rec.bg[t - 1], rec.be[t - 1]);
    grad[ix.phi_f()] += rot_sums(rm.dph, lg, le, rec.bg[t - 1], rec.be[t - 1]);
    back_rotation(rm.r, lg, le);
    --t;
  }

  for (int i = 0; i < nl; ++i) {
    // Inverse-stage rotation R(-theta_i, phi_i).
    const RotMats rm = rotation_with_grads(-kPi * u.amps[i], u.phis[i]);
    grad[ix.amp(i)] += -kPi * rot_sums(rm.dth, lg, le, rec.bg[t - 1], rec.be[t - 1]);
    grad[ix.phi(i)] += rot_sums(rm.dph, lg, le, rec.bg[t - 1], rec.be[t - 1]);
    back_rotation(rm.r, lg, le);
    --t;

    // Inverse-stage kicked ECD_i.
    const double mag = u.has_mags ? u.mags[i] : opts_.beta_mag;
    const cplx beta = mag * std::polar(1.0, u.ecd_phis[i]);
    Mat psi_g = rec.bg[t], psi_e = rec.be[t];
    // Column dots <lambda_x | psi_x> per sector.
    Vec dots_g = (lg.conjugate().cwiseProduct(psi_g)).colwise().sum().transpose();
    Vec dots_e = (le.conjugate().cwiseProduct(psi_e)).colwise().sum().transpose();
    // Kick-phase derivatives.
    cplx kick_term_phi(0, 0), kick_term_mag(0, 0);
    for (int c = 0; c < npts; ++c) {
      const cplx alpha = points_[c].value();
      const double dgam_dphi = -std::real(alpha * std::conj(beta));
      const double dgam_dmag = std::imag(alpha * std::polar(1.0, -u.ecd_phis[i]));
      const cplx diff = dots_g[c] - dots_e[c];
      kick_term_phi += dgam_dphi * diff;
      kick_term_mag += dgam_dmag * diff;
    }
    grad[ix.ecd_phi(i)] += 2.0 * (cplx(0, -1) * kick_term_phi).real();
    if (u.has_mags) grad[ix.mag(i)] += 2.0 * (cplx(0, -1) * kick_term_mag).real();
    // Magnitude generator term (uses post-gate states).
    if (u.has_mags) {
      const Mat yg = apply_mag_generator(u.ecd_phis[i], psi_g);
      const Mat ye = apply_mag_generator(u.ecd_phis[i], psi_e);
      const cplx tg = lg.conjugate().cwiseProduct(yg).sum();
      const cplx te = le.conjugate().cwiseProduct(ye).sum();
      grad[ix.mag(i)] += 2.0 * (tg - te).real();
    }
    // Number-commutator term for the direction phase.
    const cplx a_out = number_weighted_sum(lg, psi_g) + number_weighted_sum(le, psi_e);
    // Back-propagate through the kicked ECD.  The gate is self-adjoint per
    // column, so the adjoint pass is a forward application to the costate.
    {
      Mat g2, e2;
      ecd_apply_cols(i, lg, le, g2, e2);
      lg = g2 * kick_g[i].asDiagonal();
      le = e2 * kick_e[i].asDiagonal();
    }
    --t;
    const cplx a_in = number_weighted_sum(lg, rec.bg[t]) + number_weighted_sum(le, rec.be[t]);
    grad[ix.ecd_phi(i)] += 2.0 * (cplx(0, 1) * (a_out - a_in)).real();
  }

  // ---- sensing adjoint; collapse costate to a single column ----
  Vec lgu, leu;
  if (opts_.model == GateModel::kIdeal) {
    lgu = lg.rowwise().sum();
    leu = le.rowwise().sum();
  } else {
    lgu = Vec::Zero(n);
    leu = Vec::Zero(n);
    Mat tmp;
    for (int c = 0; c < npts; ++c) {
      // adjoint of M = c D(d) e^{-i w n}: M^dag = conj(c) e^{+i w n} D(-d)
      const pulse::PulseBlock& mgc = sensing_->mg[c];
      fac.apply(-mgc.d_left, lg.col(c), tmp);
      Vec v = tmp.col(0);
      for (int m = 0; m < n; ++m) v[m] *= expi(mgc.omega * m);
      lgu += std::conj(mgc.c) * v;
      const pulse::PulseBlock& mec = sensing_->me[c];
      fac.apply(-mec.d_left, le.col(c), tmp);
      v = tmp.col(0);
      for (int m = 0; m < n; ++m) v[m] *= expi(mec.omega * m);
      leu += std::conj(mec.c) * v;
    }
  }

  // ---- U stage (single column) ----
  Mat lgC = lgu, leC = leu;  // column matrices for shared helpers
  for (int i = nl - 1; i >= 0; --i) {
    // ECD_i (no kicks on the forward stage).
    const Mat psi_g = rec.ug[2 * i + 2], psi_e = rec.ue[2 * i + 2];
    const cplx a_out = number_weighted_sum(lgC, psi_g) + number_weighted_sum(leC, psi_e);
    if (u.has_mags) {
      const Mat yg = apply_mag_generator(u.ecd_phis[i], psi_g);
      const Mat ye = apply_mag_generator(u.ecd_phis[i], psi_e);
      const cplx tg = lgC.conjugate().cwiseProduct(yg).sum();
      const cplx te = leC.conjugate().cwiseProduct(ye).sum();
      grad[ix.mag(i)] += 2.0 * (tg - te).real();
    }
    {
      Mat g2, e2;
      ecd_apply_cols(i, lgC, leC, g2, e2);  // the plain ECD is self-adjoint
      lgC.swap(g2);
      leC.swap(e2);
    }
    const cplx a_in = number_weighted_sum(lgC, Mat(rec.ug[2 * i + 1])) +
                      number_weighted_sum(leC, Mat(rec.ue[2 * i + 1]));
    grad[ix.ecd_phi(i)] += 2.0 * (cplx(0, 1) * (a_out - a_in)).real();

    const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
    grad[ix.amp(i)] +=
        kPi * rot_sums(rm.dth, lgC, leC, Mat(rec.ug[2 * i]), Mat(rec.ue[2 * i]));
    grad[ix.phi(i)] += rot_sums(rm.dph, lgC, leC, Mat(rec.ug[2 * i]), Mat(rec.ue[2 * i]));
    back_rotation(rm.r, lgC, leC);
  }

  return grad;
}

// ---------------------------------------------------------------------------
// State preparation
// ---------------------------------------------------------------------------

StatePrepEvaluator::StatePrepEvaluator(EvalOptions opts, HybridState target)
    : opts_(opts), target_(std::move(target)) {
  opts_.ansatz = Ansatz::kStatePrep;
  if (target_.n_fock != opts_.fock.n_fock)
    throw InvalidSpec("target truncation does not match evaluator");
}

HybridState StatePrepEvaluator::state(const RVec& params) const {
  const Unpacked u = unpack(params, Ansatz::kStatePrep, opts_.depth);
  const int n = opts_.fock.n_fock;
  const auto& fac = DisplacementFactors::get(opts_.fock);
  Vec g = Vec::Zero(n), e = Vec::Zero(n);
  g[0] = 1.0;
  for (int i = 0; i < opts_.depth; ++i) {
    const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
    Vec g2, e2;
    mix_qubit(rm.r, g, e, g2, e2);
    const cplx half_arg = 0.5 * u.mags[i] * std::polar(1.0, u.ecd_phis[i]);
    Mat tmp;
    fac.apply(half_arg, e2, tmp);
    g = tmp.col(0);
    fac.apply(-half_arg, g2, tmp);
    e = tmp.col(0);
  }
  HybridState out;
  out.n_fock = n;
  out.amplitudes.resize(2 * n);
  out.amplitudes.head(n) = g;
  out.amplitudes.tail(n) = e;
  return out;
}

double StatePrepEvaluator::infidelity(const RVec& params) const {
  const HybridState psi = state(params);
  return 1.0 - state_fidelity(target_, psi);
}

RVec StatePrepEvaluator::gradient(const RVec& params, double* infidelity_out) const {
  const Unpacked u = unpack(params, Ansatz::kStatePrep, opts_.depth);
  const ParamIndex ix{opts_.depth, true};
  const int n = opts_.fock.n_fock;
  const int nl = opts_.depth;
  const auto& fac = DisplacementFactors::get(opts_.fock);

  std::vector<Vec> sg(2 * nl + 1), se(2 * nl + 1);
  sg[0] = Vec::Zero(n);
  se[0] = Vec::Zero(n);
  sg[0][0] = 1.0;
  for (int i = 0; i < nl; ++i) {
    const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
    mix_qubit(rm.r, sg[2 * i], se[2 * i], sg[2 * i + 1], se[2 * i + 1]);
    const cplx half_arg = 0.5 * u.mags[i] * std::polar(1.0, u.ecd_phis[i]);
    Mat tmp;
    fac.apply(half_arg, se[2 * i + 1], tmp);
    sg[2 * i + 2] = tmp.col(0);
    fac.apply(-half_arg, sg[2 * i + 1], tmp);
    se[2 * i + 2] = tmp.col(0);
  }

  const Vec tg = target_.ground(), te = target_.excited();
  const cplx c = tg.dot(sg[2 * nl]) + te.dot(se[2 * nl]);  // <T|psi>
  if (infidelity_out) *infidelity_out = 1.0 - std::norm(c);

  // Loss 1 - |c|^2: costate lambda = -c * T.
  Mat lg = (-c) * tg, le = (-c) * te;
  RVec grad = RVec::Zero(n_params());

  const auto rot_sums = [&](const Eigen::Matrix2cd& dm, const Mat& lgv, const Mat& lev,
                            const Vec& gin, const Vec& ein) -> double {
    const cplx sgg = lgv.col(0).conjugate().cwiseProduct(gin).sum();
    const cplx sge = lgv.col(0).conjugate().cwiseProduct(ein).sum();
    const cplx seg = lev.col(0).conjugate().cwiseProduct(gin).sum();
    const cplx see = lev.col(0).conjugate().cwiseProduct(ein).sum();
    return 2.0 * (dm(0, 0) * sgg + dm(0, 1) * sge + dm(1, 0) * seg + dm(1, 1) * see).real();
  };

  for (int i = nl - 1; i >= 0; --i) {
    const Mat psi_g = sg[2 * i + 2], psi_e = se[2 * i + 2];
    const cplx a_out = number_weighted_sum(lg, psi_g) + number_weighted_sum(le, psi_e);
    {
      const Mat yg = apply_mag_generator(u.ecd_phis[i], psi_g);
      const Mat ye = apply_mag_generator(u.ecd_phis[i], psi_e);
      const cplx tgs = lg.conjugate().cwiseProduct(yg).sum();
      const cplx tes = le.conjugate().cwiseProduct(ye).sum();
      grad[ix.mag(i)] += 2.0 * (tgs - tes).real();
    }
    {
      const cplx half_arg = 0.5 * u.mags[i] * std::polar(1.0, u.ecd_phis[i]);
      Mat g2, e2;
      fac.apply(half_arg, le, g2);
      fac.apply(-half_arg, lg, e2);
      lg = g2;
      le = e2;
    }
    const cplx a_in = number_weighted_sum(lg, Mat(sg[2 * i + 1])) +
                      number_weighted_sum(le, Mat(se[2 * i + 1]));
    grad[ix.ecd_phi(i)] += 2.0 * (cplx(0, 1) * (a_out - a_in)).real();

    const RotMats rm = rotation_with_grads(kPi * u.amps[i], u.phis[i]);
    grad[ix.amp(i)] += kPi * rot_sums(rm.dth, lg, le, sg[2 * i], se[2 * i]);
    grad[ix.phi(i)] += rot_sums(rm.dph, lg, le, sg[2 * i], se[2 * i]);
    Mat g2, e2;
    mix_qubit(Eigen::Matrix2cd(rm.r.adjoint()), lg, le, g2, e2);
    lg = g2;
    le = e2;
  }
  return grad;
}

// ---------------------------------------------------------------------------

Mat probe_unitary(const RVec& params, const EvalOptions& opts) {
  const Unpacked u = unpack(params, opts.ansatz, opts.depth);
  const int n = opts.fock.n_fock;
  Mat op = Mat::Identity(2 * n, 2 * n);
  for (int i = 0; i < opts.depth; ++i) {
    const double mag = u.has_mags ? u.mags[i] : opts.beta_mag;
    Mat rot, ecd;
    if (opts.model == GateModel::kPulse) {
      rot = pulse::trotterized_rotation(kPi * u.amps[i], u.phis[i], opts.phys, opts.fock,
                                        opts.trotter_steps);
      ecd = pulse::ecd_pulse_unitary(u.ecd_phis[i], mag, opts.phys, opts.fock, {}).op;
    } else {
      const Mat r2 = build_rotation(kPi * u.amps[i], u.phis[i]);
      rot = Mat::Zero(2 * n, 2 * n);
      rot.block(0, 0, n, n) = r2(0, 0) * Mat::Identity(n, n);
      rot.block(0, n, n, n) = r2(0, 1) * Mat::Identity(n, n);
      rot.block(n, 0, n, n) = r2(1, 0) * Mat::Identity(n, n);
      rot.block(n, n, n, n) = r2(1, 1) * Mat::Identity(n, n);
      Displacement beta{mag * std::cos(u.ecd_phis[i]), mag * std::sin(u.ecd_phis[i])};
      ecd = build_ecd(beta, opts.fock);
    }
    op = ecd * rot * op;
  }
  return op;
}

}  // namespace qsense::chain
