// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded generators for the binary-classification displacement datasets:
// two-arm spirals with a continuous winding number, planar shape tasks
// (rejection-sampled indicator regions on a disk), and two pedagogical
// two-displacement tasks.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsense/rng.hpp"
#include "qsense/types.hpp"

namespace qsense::tasks {

enum class TaskKind {
  kSpiral,
  kCircles,
  kPlus,
  kThreshold,
  kTriangle,
  kPsiShape,
  kSmiley,
  kTwoPoint,
  kZeroVsPm,
};

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

struct TaskSpec {
  TaskKind kind = TaskKind::kSpiral;
  double winding = 3.5;      // spiral only
  double r_max = 7.2;        // spiral outer radius
  double delta_alpha = 6.5;  // two_point / zero_vs_pm separation
  double scale = 7.2;        // max |alpha| for the shape tasks

  static TaskSpec spiral(double winding, double r_max);
  static TaskSpec shape(TaskKind kind, double scale = 7.2);
  static TaskSpec two_point(double delta_alpha);
  static TaskSpec zero_vs_pm(double delta_alpha);

  // Largest |alpha| any generated point may reach.
  double bound() const;
};

enum class Label : std::uint8_t { kA = 0, kB = 1 };
enum class Role { kTrain, kTest };

struct LabeledDataset {
  std::vector<Displacement> points;
  std::vector<Label> labels;  // parallel to points; class-A block first
  std::uint64_t seed = 0;
  Role role = Role::kTrain;

  int size() const { return static_cast<int>(points.size()); }
  int class_count(Label label) const;
};

// Deterministic for (spec, size, seed); balanced classes; all |alpha| within
// spec.bound().  Throws InvalidSpec for odd or non-positive sizes.
LabeledDataset generate(const TaskSpec& spec, int size, std::uint64_t seed);

// Noiseless spiral skeleton point: radius r = r_min + (r_max - r_min) * t
// with r_min = 0.08 * r_max, angle = 2 pi W t (+ pi for arm B).
Displacement spiral_point(Label arm, double t, double winding, double r_max);
// Jittered variant: adds Gaussian radial noise with sigma = 0.02 * r_max.
Displacement spiral_point(Label arm, double t, double winding, double r_max,
                          rng::Engine& eng);

}  // namespace qsense::tasks
