// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random number generation.  All stochastic components of the
// library draw through this engine so that results are reproducible from a
// single master seed.  The uniform and normal transforms are implemented
// here (rather than with std:: distributions, whose output is
// implementation-defined) so that a given seed yields the same stream on
// every standard library.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qsense::rng {

// splitmix64 finalizer; used both as a stand-alone mixer and to decorrelate
// derived stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives the seed of substream `stream` from a master seed.  Distinct
// streams (restarts, epochs, grid cells, ...) get decorrelated generators.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix(mix(seed, a), b);
}

class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; draws are produced in pairs.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free scaling is fine here: n is always tiny compared to 2^64.
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qsense::rng
