// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch front end: subcommands for training, protocol benchmarking,
// probability-landscape dumps, synthetic calibration, and dataset export.
// Every command is deterministic under (config, master seed).

#pragma once

#include "qsense/config.hpp"

namespace qsense::cli {

// Parses arguments and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv);

// Subcommand bodies, exposed for in-process testing.
int cmd_train(const config::RunConfig& cfg);
int cmd_benchmark(const config::RunConfig& cfg);
int cmd_landscape(const config::RunConfig& cfg);
int cmd_calibrate(const config::RunConfig& cfg);
int cmd_gen_dataset(const config::RunConfig& cfg);

}  // namespace qsense::cli
