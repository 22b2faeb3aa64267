// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared across the library: the truncated oscillator
// space, phase-space displacements, the joint qubit/oscillator state, and
// the error/warning vocabulary used by every module.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsense {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Operator = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Dimension of the truncated oscillator Hilbert space.
struct FockSpec {
  int n_fock = 50;
};

// A phase-space displacement alpha = x + i p.
struct Displacement {
  double x = 0.0;
  double p = 0.0;

  cplx value() const { return {x, p}; }
  double magnitude() const { return std::abs(value()); }
  static Displacement from(cplx a) { return {a.real(), a.imag()}; }
};

// Joint qubit (x) oscillator state.  Amplitudes are stored qubit-major:
// entries [0, n_fock) hold the ground-sector Fock amplitudes, entries
// [n_fock, 2 n_fock) the excited sector.
struct HybridState {
  int n_fock = 0;
  Vec amplitudes;

  static HybridState vacuum(const FockSpec& spec) {
    HybridState s;
    s.n_fock = spec.n_fock;
    s.amplitudes = Vec::Zero(2 * spec.n_fock);
    s.amplitudes[0] = 1.0;
    return s;
  }

  auto ground() { return amplitudes.head(n_fock); }
  auto ground() const { return amplitudes.head(n_fock); }
  auto excited() { return amplitudes.tail(n_fock); }
  auto excited() const { return amplitudes.tail(n_fock); }
};

// ---------------------------------------------------------------------------
// Errors (thrown) and warnings (reported through a replaceable handler).
// ---------------------------------------------------------------------------

// A requested operating point lies outside the validated range.
class RangeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A task/type specification is malformed (bad sizes, unknown kinds, ...).
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A nonlinear fit failed to converge to a usable optimum.
class FitDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WarningKind {
  kTruncation,        // state support approaching the Fock cutoff
  kDegenerateBranch,  // conditional expectation over a near-empty sector
  kConvergence,       // iterative optimisation stalled above tolerance
};

struct Warning {
  WarningKind kind;
  std::string message;
};

using WarningHandler = std::function<void(const Warning&)>;

// Installs a new process-wide warning handler and returns the previous one.
// The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void emit_warning(WarningKind kind, std::string message);

// RAII helper used by tests: captures warnings into a local vector and
// restores the previous handler on destruction.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<Warning>& warnings() const { return warnings_; }
  bool saw(WarningKind kind) const;

 private:
  std::vector<Warning> warnings_;
  WarningHandler previous_;
};

}  // namespace qsense
