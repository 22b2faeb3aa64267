// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

namespace qsense {

namespace {

WarningHandler& handler_slot() {
  static WarningHandler handler = [](const Warning& w) {
    const char* kind = w.kind == WarningKind::kTruncation        ? "truncation"
                       : w.kind == WarningKind::kDegenerateBranch ? "degenerate-branch"
                                                                   : "convergence";
    std::fprintf(stderr, "[qsense warning: %s] %s\n", kind, w.message.c_str());
  };
  return handler;
}

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(handler_mutex());
  WarningHandler prev = handler_slot();
  handler_slot() = std::move(handler);
  return prev;
}

void emit_warning(WarningKind kind, std::string message) {
  WarningHandler h;
  {
    std::lock_guard<std::mutex> lock(handler_mutex());
    h = handler_slot();
  }
  if (h) h(Warning{kind, std::move(message)});
}

WarningCapture::WarningCapture() {
  previous_ = set_warning_handler([this](const Warning& w) { warnings_.push_back(w); });
}

WarningCapture::~WarningCapture() { set_warning_handler(previous_); }

bool WarningCapture::saw(WarningKind kind) const {
  for (const auto& w : warnings_)
    if (w.kind == kind) return true;
  return false;
}

// ---------------------------------------------------------------------------

Mat build_annihilation(const FockSpec& spec) {
  const int n = spec.n_fock;
  if (n < 2) throw InvalidSpec("n_fock must be at least 2");
  Mat a = Mat::Zero(n, n);
  for (int m = 1; m < n; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

DisplacementFactors::DisplacementFactors(const FockSpec& spec) : n_(spec.n_fock) {
  const Mat a = build_annihilation(spec);
  // H = i (a^dag - a); Hermitian.
  Mat h = cplx(0.0, 1.0) * (a.adjoint() - a);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  w_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
}

Mat DisplacementFactors::build(cplx alpha) const {
  const double r = std::abs(alpha);
  const double t = std::arg(alpha);
  Vec phase_core = (cplx(0.0, -r) * lambda_.cast<cplx>()).array().exp();
  Mat core = w_ * phase_core.asDiagonal() * w_.adjoint();
  if (t != 0.0) {
    Vec p(n_);
    for (int m = 0; m < n_; ++m) p[m] = std::polar(1.0, t * m);
    core = p.asDiagonal() * core * p.conjugate().asDiagonal();
  }
  return core;
}

void DisplacementFactors::apply(cplx alpha, const Eigen::Ref<const Mat>& in, Mat& out) const {
  const double r = std::abs(alpha);
  const double t = std::arg(alpha);
  Vec pm(n_);
  for (int m = 0; m < n_; ++m) pm[m] = std::polar(1.0, -t * m);
  Mat tmp = pm.asDiagonal() * in;
  tmp = w_.adjoint() * tmp;
  Vec phase_core = (cplx(0.0, -r) * lambda_.cast<cplx>()).array().exp();
  tmp = phase_core.asDiagonal() * tmp;
  tmp = w_ * tmp;
  out = pm.conjugate().asDiagonal() * tmp;
}

const DisplacementFactors& DisplacementFactors::get(const FockSpec& spec) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<DisplacementFactors>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(spec.n_fock);
  if (it == cache.end())
    it = cache.emplace(spec.n_fock, std::make_unique<DisplacementFactors>(spec)).first;
  return *it->second;
}

Mat build_displacement(const Displacement& alpha, const FockSpec& spec) {
  const double n_mean = alpha.magnitude() * alpha.magnitude();
  if (n_mean > spec.n_fock / 4.0) {
    emit_warning(WarningKind::kTruncation,
                 "displacement |alpha|^2 = " + std::to_string(n_mean) +
                     " exceeds n_fock/4 = " + std::to_string(spec.n_fock / 4.0));
  }
  return DisplacementFactors::get(spec).build(alpha.value());
}

Mat build_rotation(double theta, double phi) {
  // exp[+i (theta/2) (cos phi sx + sin phi sy)] with sz|g> = +|g>:
  // the generator has matrix [[0, e^{-i phi}], [e^{+i phi}, 0]].
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Mat r(2, 2);
  r(0, 0) = c;
  r(0, 1) = cplx(0.0, 1.0) * s * std::polar(1.0, -phi);
  r(1, 0) = cplx(0.0, 1.0) * s * std::polar(1.0, phi);
  r(1, 1) = c;
  return r;
}

Mat build_ecd(const Displacement& beta, const FockSpec& spec) {
  const int n = spec.n_fock;
  const cplx half = beta.value() / 2.0;
  const Mat d_half = DisplacementFactors::get(spec).build(half);
  Mat ecd = Mat::Zero(2 * n, 2 * n);
  ecd.block(0, n, n, n) = d_half;             // |g><e| branch: D(+beta/2)
  ecd.block(n, 0, n, n) = d_half.adjoint();   // |e><g| branch: D(-beta/2)
  return ecd;
}

double excited_probability(const HybridState& psi) {
  return psi.excited().squaredNorm();
}

double state_fidelity(const HybridState& a, const HybridState& b) {
  const cplx ov = a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the left factor
  return std::norm(ov);
}

Vec coherent_state(cplx alpha, const FockSpec& spec) {
  Vec v = Vec::Zero(spec.n_fock);
  v[0] = 1.0;
  Mat out;
  DisplacementFactors::get(spec).apply(alpha, v, out);
  return out.col(0);
}

}  // namespace qsense
