// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/config.hpp"

#include <cstdlib>
#include <limits>
#include <set>
#include <string>

namespace qsense::config {

namespace {

// Rejects keys outside the allowed set so typos fail loudly.
void check_keys(const io::json& j, const std::string& context,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw InvalidSpec(context + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw InvalidSpec("unknown key '" + item.key() + "' in " + context);
}

double get_num(const io::json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

int get_int(const io::json& j, const char* key, int fallback) {
  return j.contains(key) ? j.at(key).get<int>() : fallback;
}

tasks::TaskSpec parse_task(const io::json& j) {
  check_keys(j, "task", {"kind", "winding", "r_max", "delta_alpha", "scale"});
  tasks::TaskSpec spec;
  if (j.contains("kind"))
    spec.kind = tasks::task_kind_from_string(j.at("kind").get<std::string>());
  spec.winding = get_num(j, "winding", spec.winding);
  spec.r_max = get_num(j, "r_max", spec.r_max);
  spec.delta_alpha = get_num(j, "delta_alpha", spec.delta_alpha);
  spec.scale = get_num(j, "scale", spec.scale);
  return spec;
}

protocol::Fidelity parse_fidelity(const std::string& s) {
  if (s == "ideal") return protocol::Fidelity::kIdealGate;
  if (s == "pulse") return protocol::Fidelity::kPulseLevel;
  throw InvalidSpec("fidelity must be 'ideal' or 'pulse', got '" + s + "'");
}

protocol::ProtocolConfig parse_protocol(const io::json& j) {
  check_keys(j, "protocol",
             {"depth_N", "beta_magnitude", "fidelity", "n_fock", "trotter_steps"});
  protocol::ProtocolConfig cfg;
  cfg.depth_N = get_int(j, "depth_N", cfg.depth_N);
  cfg.beta_magnitude = get_num(j, "beta_magnitude", cfg.beta_magnitude);
  if (j.contains("fidelity"))
    cfg.fidelity = parse_fidelity(j.at("fidelity").get<std::string>());
  cfg.fock.n_fock = get_int(j, "n_fock", cfg.fock.n_fock);
  cfg.trotter_steps = get_int(j, "trotter_steps", cfg.trotter_steps);
  return cfg;
}

training::TrainConfig parse_train(const io::json& j, std::vector<int>* depths) {
  check_keys(j, "train",
             {"lr", "epochs", "restarts", "train_size", "test_size", "depths"});
  training::TrainConfig cfg;
  cfg.lr = get_num(j, "lr", cfg.lr);
  cfg.epochs = get_int(j, "epochs", cfg.epochs);
  cfg.restarts = get_int(j, "restarts", cfg.restarts);
  cfg.train_size = get_int(j, "train_size", cfg.train_size);
  cfg.test_size = get_int(j, "test_size", cfg.test_size);
  if (j.contains("depths"))
    *depths = j.at("depths").get<std::vector<int>>();
  return cfg;
}

BaselineEntry parse_baseline(const io::json& j) {
  check_keys(j, "baselines entry", {"name", "n_sys", "r", "eta", "rounds", "l_s"});
  BaselineEntry e;
  e.name = j.at("name").get<std::string>();
  static const std::set<std::string> known = {
      "cat",           "compass_exact",      "compass_variational",
      "heterodyne",    "heterodyne_ideal",   "heterodyne_haystac",
      "squeezed",      "squeezed_ideal",     "squeezed_haystac",
      "gkp_ion",       "tms",                "noiseless_mlp"};
  if (!known.count(e.name)) throw InvalidSpec("unknown baseline name '" + e.name + "'");
  if (e.name == "heterodyne_haystac") e.het.n_sys = 2.3;
  if (e.name == "squeezed_ideal") e.sq.r = std::numeric_limits<double>::infinity();
  // squeezed_haystac keeps the default r = 0.46.
  e.het.n_sys = get_num(j, "n_sys", e.het.n_sys);
  e.sq.r = get_num(j, "r", e.sq.r);
  e.tms.r = get_num(j, "r", e.tms.r);
  e.gkp.eta = get_num(j, "eta", e.gkp.eta);
  e.gkp.rounds = get_int(j, "rounds", e.gkp.rounds);
  e.gkp.l_s = get_num(j, "l_s", e.gkp.l_s);
  return e;
}

BenchmarkConfig parse_benchmark(const io::json& j) {
  check_keys(j, "benchmark",
             {"winding_values", "qcds_depths", "mlp_epochs", "mlp_train_size",
              "mlp_test_size", "mlp_lr", "channel_lr", "compass_grid_size",
              "compass_refine_iters", "prep_depth"});
  BenchmarkConfig cfg;
  if (j.contains("winding_values"))
    cfg.winding_values = io::rvec_from_json(j.at("winding_values"));
  if (j.contains("qcds_depths"))
    cfg.qcds_depths = j.at("qcds_depths").get<std::vector<int>>();
  cfg.mlp.epochs = get_int(j, "mlp_epochs", cfg.mlp.epochs);
  cfg.mlp.train_size = get_int(j, "mlp_train_size", cfg.mlp.train_size);
  cfg.mlp.test_size = get_int(j, "mlp_test_size", cfg.mlp.test_size);
  cfg.mlp.lr = get_num(j, "mlp_lr", cfg.mlp.lr);
  cfg.mlp.channel_lr = get_num(j, "channel_lr", cfg.mlp.channel_lr);
  cfg.compass.grid_size = get_int(j, "compass_grid_size", cfg.compass.grid_size);
  cfg.compass.refine_iters = get_int(j, "compass_refine_iters", cfg.compass.refine_iters);
  cfg.compass.prep_depth = get_int(j, "prep_depth", cfg.compass.prep_depth);
  return cfg;
}

LandscapeConfig parse_landscape(const io::json& j) {
  check_keys(j, "landscape",
             {"checkpoint", "n_radial", "n_azimuthal", "r_max", "shots"});
  LandscapeConfig cfg;
  if (j.contains("checkpoint")) cfg.checkpoint = j.at("checkpoint").get<std::string>();
  cfg.n_radial = get_int(j, "n_radial", cfg.n_radial);
  cfg.n_azimuthal = get_int(j, "n_azimuthal", cfg.n_azimuthal);
  cfg.r_max = get_num(j, "r_max", cfg.r_max);
  if (j.contains("shots") && !j.at("shots").is_null())
    cfg.shots = j.at("shots").get<int>();
  return cfg;
}

CalibrateConfig parse_calibrate(const io::json& j) {
  check_keys(j, "calibrate",
             {"chi", "s", "t2", "t_max", "n_times", "noise", "amplitudes_z",
              "t2_init", "residual_threshold"});
  CalibrateConfig cfg;
  cfg.sweep.chi = get_num(j, "chi", cfg.sweep.chi);
  cfg.sweep.s = get_num(j, "s", cfg.sweep.s);
  cfg.sweep.t2 = get_num(j, "t2", cfg.sweep.t2);
  cfg.sweep.t_max = get_num(j, "t_max", cfg.sweep.t_max);
  cfg.sweep.n_times = get_int(j, "n_times", cfg.sweep.n_times);
  cfg.sweep.noise = get_num(j, "noise", cfg.sweep.noise);
  if (j.contains("amplitudes_z"))
    cfg.sweep.amplitudes_z = io::rvec_from_json(j.at("amplitudes_z"));
  cfg.t2_init = get_num(j, "t2_init", cfg.t2_init);
  cfg.residual_threshold = get_num(j, "residual_threshold", cfg.residual_threshold);
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const io::json& j) {
  check_keys(j, "run config",
             {"schema_version", "task", "protocol", "train", "baselines", "benchmark",
              "landscape", "calibrate", "output_dir", "master_seed"});
  if (!j.contains("schema_version"))
    throw InvalidSpec("run config is missing schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    throw InvalidSpec("unsupported schema_version " + std::to_string(version) +
                      " (expected " + std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;
  if (j.contains("task")) cfg.task = parse_task(j.at("task"));
  if (j.contains("protocol")) cfg.protocol = parse_protocol(j.at("protocol"));
  if (j.contains("train")) cfg.train = parse_train(j.at("train"), &cfg.train_depths);
  if (j.contains("baselines"))
    for (const auto& entry : j.at("baselines")) cfg.baselines.push_back(parse_baseline(entry));
  if (j.contains("benchmark")) cfg.benchmark = parse_benchmark(j.at("benchmark"));
  if (j.contains("landscape")) cfg.landscape = parse_landscape(j.at("landscape"));
  if (j.contains("calibrate")) cfg.calibrate = parse_calibrate(j.at("calibrate"));
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  if (!path.empty()) cfg = parse_run_config(io::read_json_file(path));
  apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* dir = std::getenv("QSENSE_OUTPUT_DIR"); dir && *dir)
    cfg.output_dir = dir;
  if (const char* jobs = std::getenv("QSENSE_JOBS"); jobs && *jobs) {
    const int n = std::atoi(jobs);
    if (n >= 1) cfg.jobs = n;
  }
}

}  // namespace qsense::config
