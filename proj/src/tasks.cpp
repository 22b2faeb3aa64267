// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/tasks.hpp"

#include <algorithm>
#include <cmath>

namespace qsense::tasks {

namespace {

// Geometry constants of the shape tasks, in units of TaskSpec::scale.
// The classification regions are indicator sets on the sampling disk; points
// landing inside the region are class A, the rest class B.
constexpr double kCirclesInnerRadius = 0.35;
constexpr double kCirclesOuterRadius = 0.70;
constexpr double kCirclesRadialSigma = 0.04;
constexpr double kPlusBarHalfWidth = 0.18;
constexpr double kThresholdMargin = 0.02;
constexpr double kTriangleCircumradius = 0.55;
constexpr double kPsiBarHalfWidth = 0.09;
constexpr double kPsiArmOffset = 0.38;
constexpr double kPsiTop = 0.65;
constexpr double kPsiBottom = -0.65;
constexpr double kSmileyFaceRadius = 0.75;
constexpr double kSmileyEyeRadius = 0.12;
constexpr double kSmileyEyeX = 0.28;
constexpr double kSmileyEyeY = 0.30;
constexpr double kSmileyMouthInner = 0.42;
constexpr double kSmileyMouthOuter = 0.58;
constexpr double kSmileyMouthHalfAngle = kPi / 3.0;  // around -pi/2

constexpr double kSpiralInnerFraction = 0.08;
constexpr double kSpiralRadialSigmaFraction = 0.02;

double sqr(double x) { return x * x; }

bool inside_plus(double x, double y, double w) { return std::abs(x) <= w || std::abs(y) <= w; }

bool inside_triangle(double x, double y, double circumradius) {
  // Equilateral triangle, vertex up, centroid at the origin.
  const double r = circumradius;
  // Vertices: (0, r), (+-r*sin(60deg), -r/2).
  const double s = r * std::sqrt(3.0) / 2.0;
  const double ax = 0.0, ay = r, bx = -s, by = -r / 2.0, cx = s, cy = -r / 2.0;
  const auto side = [&](double x1, double y1, double x2, double y2) {
    return (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
  };
  const double d1 = side(ax, ay, bx, by);
  const double d2 = side(bx, by, cx, cy);
  const double d3 = side(cx, cy, ax, ay);
  const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(has_neg && has_pos);
}

bool inside_psi(double x, double y) {
  const double w = kPsiBarHalfWidth;
  const bool center = std::abs(x) <= w && y >= kPsiBottom && y <= kPsiTop;
  const bool left = std::abs(x + kPsiArmOffset) <= w && y >= 0.0 && y <= kPsiTop;
  const bool right = std::abs(x - kPsiArmOffset) <= w && y >= 0.0 && y <= kPsiTop;
  const bool bar = std::abs(y) <= w && std::abs(x) <= kPsiArmOffset + w;
  return center || left || right || bar;
}

bool inside_smiley_feature(double x, double y) {
  const bool eye_l = sqr(x + kSmileyEyeX) + sqr(y - kSmileyEyeY) <= sqr(kSmileyEyeRadius);
  const bool eye_r = sqr(x - kSmileyEyeX) + sqr(y - kSmileyEyeY) <= sqr(kSmileyEyeRadius);
  const double r = std::hypot(x, y);
  const double ang = std::atan2(y, x);
  const double rel = std::remainder(ang + kPi / 2.0, 2.0 * kPi);
  const bool mouth = r >= kSmileyMouthInner && r <= kSmileyMouthOuter &&
                     std::abs(rel) <= kSmileyMouthHalfAngle;
  return eye_l || eye_r || mouth;
}

}  // namespace

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kSpiral: return "spiral";
    case TaskKind::kCircles: return "circles";
    case TaskKind::kPlus: return "plus";
    case TaskKind::kThreshold: return "threshold";
    case TaskKind::kTriangle: return "triangle";
    case TaskKind::kPsiShape: return "psi_shape";
    case TaskKind::kSmiley: return "smiley";
    case TaskKind::kTwoPoint: return "two_point";
    case TaskKind::kZeroVsPm: return "zero_vs_pm";
  }
  throw InvalidSpec("unknown task kind");
}

TaskKind task_kind_from_string(const std::string& name) {
  static const std::pair<const char*, TaskKind> kNames[] = {
      {"spiral", TaskKind::kSpiral},       {"circles", TaskKind::kCircles},
      {"plus", TaskKind::kPlus},           {"threshold", TaskKind::kThreshold},
      {"triangle", TaskKind::kTriangle},   {"psi_shape", TaskKind::kPsiShape},
      {"smiley", TaskKind::kSmiley},       {"two_point", TaskKind::kTwoPoint},
      {"zero_vs_pm", TaskKind::kZeroVsPm},
  };
  for (const auto& [n, k] : kNames)
    if (name == n) return k;
  throw InvalidSpec("unknown task kind: " + name);
}

TaskSpec TaskSpec::spiral(double winding, double r_max) {
  if (winding <= 0.0) throw InvalidSpec("spiral winding must be positive");
  if (r_max <= 0.0) throw InvalidSpec("spiral r_max must be positive");
  TaskSpec s;
  s.kind = TaskKind::kSpiral;
  s.winding = winding;
  s.r_max = r_max;
  s.scale = r_max;
  return s;
}

TaskSpec TaskSpec::shape(TaskKind kind, double scale) {
  if (scale <= 0.0) throw InvalidSpec("scale must be positive");
  TaskSpec s;
  s.kind = kind;
  s.scale = scale;
  return s;
}

TaskSpec TaskSpec::two_point(double delta_alpha) {
  TaskSpec s;
  s.kind = TaskKind::kTwoPoint;
  s.delta_alpha = delta_alpha;
  s.scale = std::abs(delta_alpha) / 2.0;
  return s;
}

TaskSpec TaskSpec::zero_vs_pm(double delta_alpha) {
  TaskSpec s;
  s.kind = TaskKind::kZeroVsPm;
  s.delta_alpha = delta_alpha;
  s.scale = std::abs(delta_alpha);
  return s;
}

double TaskSpec::bound() const {
  switch (kind) {
    case TaskKind::kSpiral: return r_max;
    case TaskKind::kTwoPoint: return std::abs(delta_alpha) / 2.0;
    case TaskKind::kZeroVsPm: return std::abs(delta_alpha);
    default: return scale;
  }
}

int LabeledDataset::class_count(Label label) const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), label));
}

Displacement spiral_point(Label arm, double t, double winding, double r_max) {
  const double r_min = kSpiralInnerFraction * r_max;
  const double r = r_min + (r_max - r_min) * t;
  const double angle = 2.0 * kPi * winding * t + (arm == Label::kB ? kPi : 0.0);
  return {r * std::cos(angle), r * std::sin(angle)};
}

Displacement spiral_point(Label arm, double t, double winding, double r_max,
                          rng::Engine& eng) {
  const double r_min = kSpiralInnerFraction * r_max;
  const double sigma = kSpiralRadialSigmaFraction * r_max;
  double r = r_min + (r_max - r_min) * t + sigma * eng.normal();
  r = std::clamp(r, 0.0, r_max);
  const double angle = 2.0 * kPi * winding * t + (arm == Label::kB ? kPi : 0.0);
  return {r * std::cos(angle), r * std::sin(angle)};
}

LabeledDataset generate(const TaskSpec& spec, int size, std::uint64_t seed) {
  if (size <= 0 || size % 2 != 0) throw InvalidSpec("dataset size must be positive and even");
  const int half = size / 2;
  LabeledDataset ds;
  ds.seed = seed;
  ds.points.reserve(size);
  ds.labels.reserve(size);
  rng::Engine eng(rng::mix(seed, static_cast<std::uint64_t>(spec.kind)));

  std::vector<Displacement> a, b;
  a.reserve(half);
  b.reserve(half);

  switch (spec.kind) {
    case TaskKind::kSpiral: {
      for (int i = 0; i < half; ++i)
        a.push_back(spiral_point(Label::kA, eng.uniform(), spec.winding, spec.r_max, eng));
      for (int i = 0; i < half; ++i)
        b.push_back(spiral_point(Label::kB, eng.uniform(), spec.winding, spec.r_max, eng));
      break;
    }
    case TaskKind::kTwoPoint: {
      const double d = spec.delta_alpha / 2.0;
      a.assign(half, {-d, 0.0});
      b.assign(half, {+d, 0.0});
      break;
    }
    case TaskKind::kZeroVsPm: {
      a.assign(half, {0.0, 0.0});
      for (int i = 0; i < half; ++i) {
        const double sign = eng.bernoulli(0.5) ? 1.0 : -1.0;
        b.push_back({sign * spec.delta_alpha, 0.0});
      }
      break;
    }
    case TaskKind::kCircles: {
      // Two concentric noisy rings: class A inner, class B outer.
      const double s = spec.scale;
      for (int i = 0; i < half; ++i) {
        const double ang = eng.uniform(0.0, 2.0 * kPi);
        const double r = std::clamp(
            kCirclesInnerRadius * s + kCirclesRadialSigma * s * eng.normal(), 0.0, s);
        a.push_back({r * std::cos(ang), r * std::sin(ang)});
      }
      for (int i = 0; i < half; ++i) {
        const double ang = eng.uniform(0.0, 2.0 * kPi);
        const double r = std::clamp(
            kCirclesOuterRadius * s + kCirclesRadialSigma * s * eng.normal(), 0.0, s);
        b.push_back({r * std::cos(ang), r * std::sin(ang)});
      }
      break;
    }
    default: {
      // Indicator-region tasks: rejection-sample the disk (the face disk for
      // the smiley), classify by region, keep until both classes are full.
      const double s = spec.scale;
      const double disk =
          spec.kind == TaskKind::kSmiley ? kSmileyFaceRadius * s : s;
      while (static_cast<int>(a.size()) < half || static_cast<int>(b.size()) < half) {
        const double r = disk * std::sqrt(eng.uniform());
        const double ang = eng.uniform(0.0, 2.0 * kPi);
        const double x = r * std::cos(ang), y = r * std::sin(ang);
        const double ux = x / s, uy = y / s;  // geometry in scale units
        bool in_region = false;
        switch (spec.kind) {
          case TaskKind::kPlus: in_region = inside_plus(ux, uy, kPlusBarHalfWidth); break;
          case TaskKind::kThreshold:
            if (std::abs(ux) <= kThresholdMargin) continue;  // margin excluded
            in_region = ux < 0.0;
            break;
          case TaskKind::kTriangle:
            in_region = inside_triangle(ux, uy, kTriangleCircumradius);
            break;
          case TaskKind::kPsiShape: in_region = inside_psi(ux, uy); break;
          case TaskKind::kSmiley: in_region = inside_smiley_feature(ux, uy); break;
          default: throw InvalidSpec("unhandled task kind");
        }
        auto& dst = in_region ? a : b;
        if (static_cast<int>(dst.size()) < half) dst.push_back({x, y});
      }
      break;
    }
  }

  for (const auto& p : a) {
    ds.points.push_back(p);
    ds.labels.push_back(Label::kA);
  }
  for (const auto& p : b) {
    ds.points.push_back(p);
    ds.labels.push_back(Label::kB);
  }
  return ds;
}

}  // namespace qsense::tasks
