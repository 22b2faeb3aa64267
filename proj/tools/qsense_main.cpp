// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/cli.hpp"

int main(int argc, char** argv) { return qsense::cli::run_cli(argc, argv); }
