// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative run configuration: a schema-versioned JSON file with strict
// unknown-key rejection, plus environment overrides for the output directory
// and parallelism degree.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsense/baselines.hpp"
#include "qsense/calibration.hpp"
#include "qsense/io.hpp"
#include "qsense/protocol.hpp"
#include "qsense/tasks.hpp"
#include "qsense/training.hpp"
#include "qsense/types.hpp"

namespace qsense::config {

inline constexpr int kSchemaVersion = 1;

// One enabled baseline; `name` selects the preset and labels the CSV rows.
// Recognised names: cat, compass_exact, compass_variational,
// heterodyne_ideal, heterodyne_haystac, heterodyne, squeezed_ideal,
// squeezed_haystac, squeezed, gkp_ion, tms, noiseless_mlp.
struct BaselineEntry {
  std::string name;
  baselines::HeterodyneConfig het{};
  baselines::SqueezedConfig sq{};
  baselines::GkpIonConfig gkp{};
  baselines::TmsConfig tms{};
};

struct BenchmarkConfig {
  RVec winding_values;               // empty = 0.5, 1.0, ..., 5.0
  std::vector<int> qcds_depths{1};   // best-over-depth candidates
  baselines::MlpTrainConfig mlp{};   // backend settings for channel baselines
  baselines::CompassTrainConfig compass{};
};

struct LandscapeConfig {
  std::string checkpoint;  // empty = <output_dir>/checkpoint.json
  int n_radial = 30;
  int n_azimuthal = 100;
  double r_max = 0.0;  // <= 0 = task bound
  std::optional<int> shots;  // absent = exact probabilities
};

struct CalibrateConfig {
  calibration::SyntheticSweepConfig sweep{};
  double t2_init = 25e-6;
  double residual_threshold = 0.5;
};

struct RunConfig {
  tasks::TaskSpec task{};
  protocol::ProtocolConfig protocol{};
  training::TrainConfig train{};
  std::vector<int> train_depths;  // optional depth sweep for the train command
  std::vector<BaselineEntry> baselines;
  BenchmarkConfig benchmark{};
  LandscapeConfig landscape{};
  CalibrateConfig calibrate{};
  std::string output_dir = "out";
  std::uint64_t master_seed = 0;
  int jobs = 1;

  // Set by the command line, not the file.
  bool fidelity_overridden = false;
};

// Strict parse: unknown keys and schema-version mismatches throw InvalidSpec.
RunConfig parse_run_config(const io::json& j);

// Reads the file (missing path = defaults) and applies QSENSE_OUTPUT_DIR /
// QSENSE_JOBS environment overrides.
RunConfig load_run_config(const std::string& path);

void apply_env_overrides(RunConfig& cfg);

}  // namespace qsense::config
