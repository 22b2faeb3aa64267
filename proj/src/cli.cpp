// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include "qsense/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsense/baselines.hpp"
#include "qsense/calibration.hpp"
#include "qsense/io.hpp"
#include "qsense/protocol.hpp"
#include "qsense/rng.hpp"
#include "qsense/tasks.hpp"
#include "qsense/training.hpp"

namespace fs = std::filesystem;

namespace qsense::cli {

namespace {

std::string fidelity_name(protocol::Fidelity f) {
  return f == protocol::Fidelity::kIdealGate ? "ideal" : "pulse";
}

io::json task_json(const tasks::TaskSpec& t) {
  io::json j;
  j["kind"] = tasks::to_string(t.kind);
  j["winding"] = t.winding;
  j["r_max"] = t.r_max;
  j["delta_alpha"] = t.delta_alpha;
  j["scale"] = t.scale;
  return j;
}

io::json protocol_json(const protocol::ProtocolConfig& p) {
  io::json j;
  j["depth_N"] = p.depth_N;
  j["beta_magnitude"] = p.beta_magnitude;
  j["fidelity"] = fidelity_name(p.fidelity);
  j["n_fock"] = p.fock.n_fock;
  j["trotter_steps"] = p.trotter_steps;
  return j;
}

io::json train_json(const training::TrainConfig& t) {
  io::json j;
  j["lr"] = t.lr;
  j["epochs"] = t.epochs;
  j["restarts"] = t.restarts;
  j["train_size"] = t.train_size;
  j["test_size"] = t.test_size;
  return j;
}

io::json checkpoint_json(const protocol::CircuitParams& params,
                         const protocol::ProtocolConfig& proto) {
  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["depth"] = params.depth();
  j["thetas"] = io::rvec_to_json(params.thetas);
  j["phis"] = io::rvec_to_json(params.phis);
  j["ecd_phases"] = io::rvec_to_json(params.ecd_phases);
  if (params.has_magnitudes()) j["magnitudes"] = io::rvec_to_json(params.magnitudes);
  j["final_theta"] = params.final_theta;
  j["final_phi"] = params.final_phi;
  j["protocol"] = protocol_json(proto);
  j["params_hash"] = io::params_hash(params.to_flat());
  return j;
}

std::pair<protocol::CircuitParams, protocol::ProtocolConfig> read_checkpoint(
    const std::string& path) {
  const io::json j = io::read_json_file(path);
  if (!j.contains("schema_version") ||
      j.at("schema_version").get<int>() != config::kSchemaVersion)
    throw InvalidSpec("checkpoint has an unsupported schema version");
  protocol::CircuitParams p;
  p.thetas = io::rvec_from_json(j.at("thetas"));
  p.phis = io::rvec_from_json(j.at("phis"));
  p.ecd_phases = io::rvec_from_json(j.at("ecd_phases"));
  if (j.contains("magnitudes")) p.magnitudes = io::rvec_from_json(j.at("magnitudes"));
  p.final_theta = j.at("final_theta").get<double>();
  p.final_phi = j.at("final_phi").get<double>();

  protocol::ProtocolConfig proto;
  const io::json& pj = j.at("protocol");
  proto.depth_N = pj.at("depth_N").get<int>();
  proto.beta_magnitude = pj.at("beta_magnitude").get<double>();
  proto.fidelity = pj.at("fidelity").get<std::string>() == "pulse"
                       ? protocol::Fidelity::kPulseLevel
                       : protocol::Fidelity::kIdealGate;
  proto.fock.n_fock = pj.at("n_fock").get<int>();
  proto.trotter_steps = pj.at("trotter_steps").get<int>();
  return {p, proto};
}

double binomial_stderr(double acc, int n) {
  return std::sqrt(std::max(acc * (1.0 - acc), 0.0) / std::max(n, 1));
}

// Accuracy of one baseline entry on one task instance; n_test_out reports
// the test-set size its standard error refers to.
double run_baseline_entry(const config::BaselineEntry& e, const tasks::TaskSpec& task,
                          const config::RunConfig& cfg, int* n_test_out) {
  baselines::MlpTrainConfig mc = cfg.benchmark.mlp;
  mc.seed = cfg.master_seed;
  *n_test_out = mc.test_size;

  if (e.name == "cat") {
    training::TrainConfig tc = cfg.train;
    tc.seed = cfg.master_seed;
    *n_test_out = tc.test_size;
    return baselines::cat_train_eval(task, tc, cfg.protocol).best_test_accuracy;
  }
  if (e.name == "compass_exact" || e.name == "compass_variational") {
    baselines::CompassTrainConfig cc = cfg.benchmark.compass;
    cc.seed = cfg.master_seed;
    cc.train_size = cfg.train.train_size;
    cc.test_size = cfg.train.test_size;
    cc.fock = cfg.protocol.fock;
    *n_test_out = cc.test_size;
    if (e.name == "compass_exact")
      return baselines::compass_exact_train_eval(task, cc).test_accuracy;
    return baselines::compass_variational_train_eval(task, cc).test_accuracy;
  }

  const auto run_channel = [&](baselines::BaselineChannel& ch) {
    return baselines::mlp_train_eval(ch, task, ch.default_mlp(), mc);
  };
  if (e.name == "heterodyne" || e.name == "heterodyne_ideal" ||
      e.name == "heterodyne_haystac") {
    baselines::HeterodyneChannel ch(e.het);
    return run_channel(ch);
  }
  if (e.name == "squeezed" || e.name == "squeezed_ideal" || e.name == "squeezed_haystac") {
    const tasks::LabeledDataset train = tasks::generate(
        task, mc.train_size, rng::mix(mc.seed, training::kTrainDataSalt));
    const tasks::LabeledDataset test = tasks::generate(
        task, mc.test_size, rng::mix(mc.seed, training::kTestDataSalt));
    baselines::SqueezedConfig sq = e.sq;
    sq.scale = task.bound();
    sq.axis_phi = baselines::squeezed_axis_init(train);
    baselines::SqueezedChannel ch(sq);
    return baselines::mlp_train_eval(ch, train, test, ch.default_mlp(), mc);
  }
  if (e.name == "gkp_ion") {
    baselines::GkpIonChannel ch(e.gkp);
    return run_channel(ch);
  }
  if (e.name == "tms") {
    baselines::TmsChannel ch(e.tms);
    return run_channel(ch);
  }
  if (e.name == "noiseless_mlp") {
    baselines::NoiselessChannel ch;
    return run_channel(ch);
  }
  throw InvalidSpec("unknown baseline name '" + e.name + "'");
}

}  // namespace

int cmd_train(const config::RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  const std::vector<int> depths =
      cfg.train_depths.empty() ? std::vector<int>{cfg.protocol.depth_N} : cfg.train_depths;
  for (const int depth : depths) {
    protocol::ProtocolConfig proto = cfg.protocol;
    proto.depth_N = depth;
    training::TrainConfig tc = cfg.train;
    tc.seed = cfg.master_seed;
    const training::TrainReport rep = training::train(tc, proto, cfg.task);

    const std::string suffix = depths.size() == 1 ? "" : "_N" + std::to_string(depth);
    io::json j;
    j["schema_version"] = config::kSchemaVersion;
    j["task"] = task_json(cfg.task);
    j["protocol"] = protocol_json(proto);
    j["train"] = train_json(tc);
    j["master_seed"] = cfg.master_seed;
    j["best_accuracy"] = rep.best_accuracy;
    j["best_restart"] = rep.best_restart;
    j["restart_train_accuracy"] = io::rvec_to_json(rep.restart_train_accuracy);
    j["restart_test_accuracy"] = io::rvec_to_json(rep.restart_test_accuracy);
    j["final_loss"] =
        rep.loss_history.size() ? rep.loss_history[rep.loss_history.size() - 1] : 0.0;
    j["params_hash"] = io::params_hash(rep.best_params.to_flat());
    io::write_json_file(cfg.output_dir + "/train_report" + suffix + ".json", j);

    io::write_json_file(cfg.output_dir + "/checkpoint" + suffix + ".json",
                        checkpoint_json(rep.best_params, proto));

    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k < rep.loss_history.size(); ++k)
      rows.push_back({std::to_string(k), io::format_double(rep.loss_history[k]),
                      io::format_double(rep.accuracy_history[k])});
    io::write_csv(cfg.output_dir + "/accuracy_history" + suffix + ".csv",
                  {"epoch", "loss", "test_accuracy"}, rows);

    std::cout << "train depth " << depth << ": test accuracy "
              << io::format_double(rep.best_accuracy) << " (restart "
              << rep.best_restart << ")\n";
  }
  return 0;
}

int cmd_benchmark(const config::RunConfig& cfg) {
  if (cfg.baselines.empty()) {
    std::cerr << "error: benchmark requires a nonempty baselines list\n";
    return 1;
  }
  if (cfg.task.kind != tasks::TaskKind::kSpiral) {
    std::cerr << "error: the benchmark sweep is defined over the spiral task family\n";
    return 1;
  }
  fs::create_directories(cfg.output_dir);

  RVec ws = cfg.benchmark.winding_values;
  if (ws.size() == 0) {
    ws.resize(10);
    for (int i = 0; i < 10; ++i) ws[i] = 0.5 + 0.5 * i;
  }

  std::vector<std::vector<std::string>> rows;
  io::json failures = io::json::array();
  const auto add_row = [&](const std::string& name, double w, double acc, int n_test) {
    rows.push_back({name, io::format_double(w), io::format_double(acc),
                    io::format_double(binomial_stderr(acc, n_test))});
  };
  const auto record_failure = [&](const std::string& name, double w,
                                  const std::string& what) {
    io::json f;
    f["protocol"] = name;
    f["W"] = w;
    f["error"] = what;
    failures.push_back(f);
    rows.push_back({name, io::format_double(w), "nan", "nan"});
    std::cerr << "benchmark cell failed (" << name << ", W=" << w << "): " << what
              << "\n";
  };

  for (int wi = 0; wi < ws.size(); ++wi) {
    tasks::TaskSpec task = cfg.task;
    task.winding = ws[wi];

    try {
      double best = 0.0;
      for (const int depth : cfg.benchmark.qcds_depths) {
        protocol::ProtocolConfig proto = cfg.protocol;
        proto.depth_N = depth;
        training::TrainConfig tc = cfg.train;
        tc.seed = cfg.master_seed;
        best = std::max(best, training::train(tc, proto, task).best_accuracy);
      }
      add_row("qcds", ws[wi], best, cfg.train.test_size);
    } catch (const std::exception& ex) {
      record_failure("qcds", ws[wi], ex.what());
    }

    for (const config::BaselineEntry& entry : cfg.baselines) {
      try {
        int n_test = cfg.train.test_size;
        const double acc = run_baseline_entry(entry, task, cfg, &n_test);
        add_row(entry.name, ws[wi], acc, n_test);
      } catch (const std::exception& ex) {
        record_failure(entry.name, ws[wi], ex.what());
      }
    }
  }

  io::write_csv(cfg.output_dir + "/benchmark.csv",
                {"protocol", "W", "accuracy", "stderr"}, rows);
  io::json meta;
  meta["schema_version"] = config::kSchemaVersion;
  meta["task"] = task_json(cfg.task);
  meta["master_seed"] = cfg.master_seed;
  meta["winding_values"] = io::rvec_to_json(ws);
  meta["failures"] = failures;
  io::write_json_file(cfg.output_dir + "/benchmark.json", meta);
  std::cout << "benchmark: " << rows.size() << " rows -> " << cfg.output_dir
            << "/benchmark.csv\n";
  return failures.empty() ? 0 : 1;
}

int cmd_landscape(const config::RunConfig& cfg) {
  const std::string ckpt = cfg.landscape.checkpoint.empty()
                               ? cfg.output_dir + "/checkpoint.json"
                               : cfg.landscape.checkpoint;
  if (!fs::exists(ckpt)) {
    std::cerr << "error: checkpoint not found: " << ckpt << "\n";
    return 1;
  }
  auto [params, proto] = read_checkpoint(ckpt);
  if (cfg.fidelity_overridden) proto.fidelity = cfg.protocol.fidelity;
  const double r_max = cfg.landscape.r_max > 0.0 ? cfg.landscape.r_max : cfg.task.bound();

  fs::create_directories(cfg.output_dir);
  const protocol::LandscapeGrid grid = protocol::landscape_sweep(
      params, proto, r_max, cfg.landscape.n_radial, cfg.landscape.n_azimuthal,
      cfg.landscape.shots, cfg.master_seed, cfg.jobs);

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < grid.n_radial; ++i)
    for (int j = 0; j < grid.n_azimuthal; ++j) {
      const double r = grid.radii[i];
      const double phi = grid.azimuths[j];
      rows.push_back({io::format_double(r), io::format_double(phi),
                      io::format_double(r * std::cos(phi)),
                      io::format_double(r * std::sin(phi)),
                      io::format_double(grid.p_e[i * grid.n_azimuthal + j])});
    }
  io::write_csv(cfg.output_dir + "/landscape.csv",
                {"r", "phi", "alpha_x", "alpha_p", "p_e"}, rows);

  io::json meta;
  meta["schema_version"] = config::kSchemaVersion;
  meta["depth"] = params.depth();
  meta["fidelity"] = fidelity_name(proto.fidelity);
  meta["seed"] = grid.master_seed;
  meta["params_hash"] = io::params_hash(params.to_flat());
  meta["n_radial"] = grid.n_radial;
  meta["n_azimuthal"] = grid.n_azimuthal;
  meta["r_max"] = grid.r_max;
  if (grid.shots)
    meta["shots"] = *grid.shots;
  else
    meta["shots"] = nullptr;
  io::write_json_file(cfg.output_dir + "/landscape.json", meta);
  std::cout << "landscape: " << rows.size() << " cells -> " << cfg.output_dir
            << "/landscape.csv\n";
  return 0;
}

int cmd_calibrate(const config::RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  calibration::SyntheticSweepConfig sc = cfg.calibrate.sweep;
  sc.seed = cfg.master_seed;
  const calibration::RamseySweep sweep = calibration::make_synthetic_sweep(sc);

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < sweep.amplitudes_z.size(); ++i)
    for (int j = 0; j < sweep.times.size(); ++j)
      rows.push_back({io::format_double(sweep.amplitudes_z[i]),
                      io::format_double(sweep.times[j]),
                      io::format_double(sweep.p_e(i, j))});
  io::write_csv(cfg.output_dir + "/sweep.csv", {"z", "time", "p_e"}, rows);

  calibration::FitResult fit;
  try {
    fit = calibration::fit_and_extract(sweep, cfg.calibrate.t2_init,
                                       cfg.calibrate.residual_threshold);
  } catch (const FitDiverged& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }

  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["m1"] = fit.m1;
  j["m2"] = fit.m2;
  j["f0"] = fit.f0;
  j["chi_est"] = fit.chi_est;
  j["s_est"] = fit.s_est;
  j["chi_true"] = sc.chi;
  j["s_true"] = sc.s;
  j["chi_rel_error"] = std::abs(fit.chi_est - sc.chi) / sc.chi;
  j["s_rel_error"] = std::abs(fit.s_est - sc.s) / sc.s;
  io::json per = io::json::array();
  for (int i = 0; i < sweep.amplitudes_z.size(); ++i) {
    const fit::RamseyFitParams& fp = fit.per_amplitude[static_cast<std::size_t>(i)];
    io::json row;
    row["z"] = sweep.amplitudes_z[i];
    row["a"] = fp.a;
    row["a0"] = fp.a0;
    row["c"] = fp.c;
    row["f"] = fp.f;
    row["t2"] = fp.t2;
    row["residual_norm"] = fp.residual_norm;
    per.push_back(row);
  }
  j["per_amplitude"] = per;
  io::write_json_file(cfg.output_dir + "/fit.json", j);
  std::cout << "calibrate: chi_est " << io::format_double(fit.chi_est) << " (rel err "
            << io::format_double(std::abs(fit.chi_est - sc.chi) / sc.chi) << "), s_est "
            << io::format_double(fit.s_est) << " (rel err "
            << io::format_double(std::abs(fit.s_est - sc.s) / sc.s) << ")\n";
  return 0;
}

int cmd_gen_dataset(const config::RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  // Matches the training dataset drawn for the same master seed.
  const tasks::LabeledDataset data = tasks::generate(
      cfg.task, cfg.train.train_size, rng::mix(cfg.master_seed, training::kTrainDataSalt));
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < data.size(); ++i)
    rows.push_back({io::format_double(data.points[static_cast<std::size_t>(i)].x),
                    io::format_double(data.points[static_cast<std::size_t>(i)].p),
                    std::to_string(static_cast<int>(data.labels[static_cast<std::size_t>(i)]))});
  io::write_csv(cfg.output_dir + "/dataset.csv", {"x", "p", "label"}, rows);
  std::cout << "gen-dataset: " << data.size() << " points -> " << cfg.output_dir
            << "/dataset.csv\n";
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"simulator, trainer, and benchmark harness for quantum "
               "computational displacement sensing"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string fidelity;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration file");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--jobs", jobs, "worker thread count override");
    sub->add_option("--fidelity", fidelity, "gate model override")
        ->check(CLI::IsMember({"ideal", "pulse"}));
  };
  CLI::App* sub_train = app.add_subcommand("train", "train circuit parameters");
  CLI::App* sub_bench =
      app.add_subcommand("benchmark", "accuracy-vs-winding protocol comparison");
  CLI::App* sub_land =
      app.add_subcommand("landscape", "polar probability landscape from a checkpoint");
  CLI::App* sub_cal =
      app.add_subcommand("calibrate", "synthetic dispersive-shift calibration");
  CLI::App* sub_gen = app.add_subcommand("gen-dataset", "export a task dataset as CSV");
  for (CLI::App* sub : {sub_train, sub_bench, sub_land, sub_cal, sub_gen})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    config::RunConfig cfg = config::load_run_config(config_path);
    if (seed) cfg.master_seed = *seed;
    if (jobs) cfg.jobs = std::max(1, *jobs);
    if (!fidelity.empty()) {
      cfg.protocol.fidelity = fidelity == "pulse" ? protocol::Fidelity::kPulseLevel
                                                  : protocol::Fidelity::kIdealGate;
      cfg.fidelity_overridden = true;
    }
    if (sub_train->parsed()) return cmd_train(cfg);
    if (sub_bench->parsed()) return cmd_benchmark(cfg);
    if (sub_land->parsed()) return cmd_landscape(cfg);
    if (sub_cal->parsed()) return cmd_calibrate(cfg);
    if (sub_gen->parsed()) return cmd_gen_dataset(cfg);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qsense::cli
