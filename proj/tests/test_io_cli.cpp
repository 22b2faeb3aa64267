// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>

#include "qsense/cli.hpp"
#include "qsense/config.hpp"
#include "qsense/io.hpp"
#include "qsense/types.hpp"

using namespace qsense;
namespace fs = std::filesystem;

namespace {

// Spawns the installed command-line binary and returns its exit code.
int run_cli_binary(const std::string& args) {
  const std::string cmd =
      std::string("\"") + QSENSE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

int count_lines_crlf(const std::string& text) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i)
    if (text[i] == '\r' && text[i + 1] == '\n') ++n;
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("io_cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Minimal fast training configuration on the two-displacement task.
io::json tiny_train_config(const std::string& out_dir) {
  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["task"] = {{"kind", "two_point"}, {"delta_alpha", 6.5}};
  j["protocol"] = {{"depth_N", 1}, {"n_fock", 24}};
  j["train"] = {{"epochs", 25}, {"restarts", 2}, {"train_size", 16}, {"test_size", 16}};
  j["output_dir"] = out_dir;
  return j;
}

fs::path write_config(const fs::path& dir, const io::json& j) {
  const fs::path path = dir / "config.json";
  io::write_json_file(path.string(), j);
  return path;
}

}  // namespace

TEST_SUITE("io_cli") {

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, kPi, 0.24, 1e300,
                   std::numeric_limits<double>::denorm_min()}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-3.0) == "-3");
}

TEST_CASE("csv escaping") {
  CHECK(io::csv_escape("plain") == "plain");
  CHECK(io::csv_escape("3.25") == "3.25");
  CHECK(io::csv_escape("a,b") == "\"a,b\"");
  CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(io::csv_escape("") == "");
}

TEST_CASE("csv files use CRLF and quoted fields") {
  const fs::path dir = fresh_dir("csv");
  const fs::path path = dir / "t.csv";
  io::write_csv(path.string(), {"name", "value"}, {{"x", "1"}, {"a,b", "\"q\""}});
  const std::string text = slurp(path);
  CHECK(text == "name,value\r\nx,1\r\n\"a,b\",\"\"\"q\"\"\"\r\n");
  CHECK_THROWS(io::write_csv(path.string(), {"one"}, {{"a", "b"}}));
}

TEST_CASE("json file and vector round trips") {
  const fs::path dir = fresh_dir("json");
  const fs::path path = dir / "t.json";
  io::json j;
  j["a"] = 1;
  j["b"] = {{"c", "text"}};
  RVec v(3);
  v << 0.1, -2.0, 3.0 / 7.0;
  j["v"] = io::rvec_to_json(v);
  io::write_json_file(path.string(), j);
  const io::json back = io::read_json_file(path.string());
  CHECK(back == j);
  const RVec w = io::rvec_from_json(back.at("v"));
  CHECK((w - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(io::read_json_file((dir / "missing.json").string()));
  CHECK_THROWS(io::rvec_from_json(io::json::object()));
}

TEST_CASE("parameter hash is a stable 64-bit fingerprint") {
  CHECK(io::params_hash(RVec()) == "cbf29ce484222325");  // FNV offset basis
  RVec v(4);
  v << 0.1, 0.2, 0.3, 0.4;
  const std::string h = io::params_hash(v);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(io::params_hash(v) == h);
  RVec w = v;
  w[2] = -w[2];
  CHECK(io::params_hash(w) != h);
}

TEST_CASE("run config: defaults, presets, and strict keys") {
  io::json minimal;
  minimal["schema_version"] = 1;
  const config::RunConfig defaults = config::parse_run_config(minimal);
  CHECK(defaults.output_dir == "out");
  CHECK(defaults.protocol.depth_N == 1);
  CHECK(defaults.task.winding == 3.5);
  CHECK(defaults.task.r_max == 7.2);
  CHECK(defaults.train.epochs == 1000);
  CHECK_FALSE(defaults.landscape.shots.has_value());

  io::json full = minimal;
  full["task"] = {{"kind", "spiral"}, {"winding", 2.0}, {"r_max", 5.0}};
  full["protocol"] = {{"depth_N", 3}, {"fidelity", "pulse"}, {"n_fock", 40}};
  full["train"] = {{"epochs", 250}, {"depths", {1, 2, 3}}};
  full["baselines"] = {
      {{"name", "squeezed_ideal"}},
      {{"name", "heterodyne_haystac"}},
      {{"name", "heterodyne"}, {"n_sys", 1.7}},
      {{"name", "gkp_ion"}, {"eta", 0.5}, {"rounds", 3}},
  };
  full["landscape"] = {{"n_radial", 5}, {"shots", 64}};
  full["calibrate"] = {{"noise", 0.01}, {"t2_init", 20e-6}};
  full["master_seed"] = 17;
  const config::RunConfig cfg = config::parse_run_config(full);
  CHECK(cfg.task.winding == 2.0);
  CHECK(cfg.protocol.depth_N == 3);
  CHECK(cfg.protocol.fidelity == protocol::Fidelity::kPulseLevel);
  CHECK(cfg.protocol.fock.n_fock == 40);
  CHECK(cfg.train.epochs == 250);
  CHECK(cfg.train_depths == std::vector<int>{1, 2, 3});
  REQUIRE(cfg.baselines.size() == 4);
  CHECK(cfg.baselines[0].sq.r == std::numeric_limits<double>::infinity());
  CHECK(cfg.baselines[1].het.n_sys == 2.3);
  CHECK(cfg.baselines[2].het.n_sys == 1.7);
  CHECK(cfg.baselines[3].gkp.eta == 0.5);
  CHECK(cfg.baselines[3].gkp.rounds == 3);
  REQUIRE(cfg.landscape.shots.has_value());
  CHECK(*cfg.landscape.shots == 64);
  CHECK(cfg.landscape.n_radial == 5);
  CHECK(cfg.calibrate.sweep.noise == 0.01);
  CHECK(cfg.calibrate.t2_init == 20e-6);
  CHECK(cfg.master_seed == 17);

  io::json bad_top = minimal;
  bad_top["outputdir"] = "x";
  CHECK_THROWS_AS(config::parse_run_config(bad_top), InvalidSpec);
  io::json bad_nested = minimal;
  bad_nested["protocol"] = {{"depth", 3}};
  CHECK_THROWS_AS(config::parse_run_config(bad_nested), InvalidSpec);
  io::json bad_name = minimal;
  bad_name["baselines"] = {{{"name", "quantum_telepathy"}}};
  CHECK_THROWS_AS(config::parse_run_config(bad_name), InvalidSpec);

  io::json no_version;
  no_version["output_dir"] = "x";
  CHECK_THROWS_AS(config::parse_run_config(no_version), InvalidSpec);
  io::json wrong_version;
  wrong_version["schema_version"] = 2;
  CHECK_THROWS_AS(config::parse_run_config(wrong_version), InvalidSpec);
}

TEST_CASE("environment overrides") {
  const char* prev_dir = std::getenv("QSENSE_OUTPUT_DIR");
  const char* prev_jobs = std::getenv("QSENSE_JOBS");
  setenv("QSENSE_OUTPUT_DIR", "env_dir", 1);
  setenv("QSENSE_JOBS", "4", 1);
  config::RunConfig cfg;
  config::apply_env_overrides(cfg);
  CHECK(cfg.output_dir == "env_dir");
  CHECK(cfg.jobs == 4);

  setenv("QSENSE_JOBS", "0", 1);  // out of range: ignored
  config::RunConfig cfg2;
  config::apply_env_overrides(cfg2);
  CHECK(cfg2.jobs == 1);

  if (prev_dir) setenv("QSENSE_OUTPUT_DIR", prev_dir, 1);
  else unsetenv("QSENSE_OUTPUT_DIR");
  if (prev_jobs) setenv("QSENSE_JOBS", prev_jobs, 1);
  else unsetenv("QSENSE_JOBS");
}

TEST_CASE("cli rejects bad invocations") {
  const std::vector<const char*> no_sub = {"qsense"};
  CHECK(cli::run_cli(1, no_sub.data()) != 0);
  const std::vector<const char*> bad_sub = {"qsense", "frobnicate"};
  CHECK(cli::run_cli(2, bad_sub.data()) != 0);
  const std::vector<const char*> missing_cfg = {"qsense", "train", "--config",
                                                "definitely_missing.json"};
  CHECK(cli::run_cli(4, missing_cfg.data()) == 1);
}

TEST_CASE("train command writes a reproducible report triple") {
  const fs::path dir = fresh_dir("train");
  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  const fs::path cfg_a = write_config(dir, tiny_train_config(out_a.string()));

  REQUIRE(run_cli_binary("train --config " + cfg_a.string()) == 0);
  for (const char* name : {"train_report.json", "checkpoint.json", "accuracy_history.csv"}) {
    CHECK(fs::exists(out_a / name));
  }

  const io::json report = io::read_json_file((out_a / "train_report.json").string());
  CHECK(report.at("schema_version") == config::kSchemaVersion);
  CHECK(report.at("best_accuracy").get<double>() > 0.9);  // trivial task
  const io::json ckpt = io::read_json_file((out_a / "checkpoint.json").string());
  CHECK(ckpt.at("depth") == 1);
  CHECK(ckpt.at("params_hash") == report.at("params_hash"));
  CHECK(ckpt.at("protocol").at("n_fock") == 24);

  const std::string history = slurp(out_a / "accuracy_history.csv");
  CHECK(count_lines_crlf(history) == 26);  // header + 25 epochs
  CHECK(history.rfind("epoch,loss,test_accuracy\r\n", 0) == 0);

  // Same config and seed into a second directory: byte-identical outputs.
  io::json cfg_json_b = tiny_train_config(out_b.string());
  const fs::path cfg_b = dir / "config_b.json";
  io::write_json_file(cfg_b.string(), cfg_json_b);
  REQUIRE(run_cli_binary("train --config " + cfg_b.string()) == 0);
  for (const char* name : {"train_report.json", "checkpoint.json", "accuracy_history.csv"}) {
    CHECK(slurp(out_a / name) == slurp(out_b / name));
  }

  // A different master seed changes the result bytes.
  const fs::path out_c = dir / "c";
  io::json cfg_json_c = tiny_train_config(out_c.string());
  const fs::path cfg_c = dir / "config_c.json";
  io::write_json_file(cfg_c.string(), cfg_json_c);
  REQUIRE(run_cli_binary("train --config " + cfg_c.string() + " --seed 1") == 0);
  CHECK(slurp(out_a / "train_report.json") != slurp(out_c / "train_report.json"));
}

TEST_CASE("train depth sweep writes suffixed files") {
  const fs::path dir = fresh_dir("depths");
  const fs::path out = dir / "out";
  io::json j = tiny_train_config(out.string());
  j["train"]["depths"] = {1, 2};
  j["train"]["epochs"] = 10;
  j["train"]["restarts"] = 1;
  const fs::path cfg = write_config(dir, j);
  REQUIRE(run_cli_binary("train --config " + cfg.string()) == 0);
  for (const char* name :
       {"train_report_N1.json", "train_report_N2.json", "checkpoint_N1.json",
        "checkpoint_N2.json", "accuracy_history_N1.csv", "accuracy_history_N2.csv"}) {
    CHECK(fs::exists(out / name));
  }
  const io::json r2 = io::read_json_file((out / "train_report_N2.json").string());
  CHECK(r2.at("protocol").at("depth_N") == 2);
}

TEST_CASE("landscape command requires a checkpoint and reproduces itself") {
  const fs::path dir = fresh_dir("landscape");
  const fs::path out_train = dir / "train";
  const fs::path cfg_train = write_config(dir, tiny_train_config(out_train.string()));

  // No checkpoint yet: hard failure.
  io::json lj;
  lj["schema_version"] = config::kSchemaVersion;
  lj["output_dir"] = (dir / "land_a").string();
  lj["landscape"] = {{"checkpoint", (out_train / "checkpoint.json").string()},
                     {"n_radial", 5},
                     {"n_azimuthal", 8},
                     {"r_max", 2.0}};
  const fs::path cfg_land = dir / "land.json";
  io::write_json_file(cfg_land.string(), lj);
  CHECK(run_cli_binary("landscape --config " + cfg_land.string()) == 1);

  REQUIRE(run_cli_binary("train --config " + cfg_train.string()) == 0);
  REQUIRE(run_cli_binary("landscape --config " + cfg_land.string()) == 0);

  const std::string csv = slurp(dir / "land_a" / "landscape.csv");
  CHECK(count_lines_crlf(csv) == 1 + 5 * 8);
  CHECK(csv.rfind("r,phi,alpha_x,alpha_p,p_e\r\n", 0) == 0);
  const io::json meta = io::read_json_file((dir / "land_a" / "landscape.json").string());
  CHECK(meta.at("n_radial") == 5);
  CHECK(meta.at("n_azimuthal") == 8);
  CHECK(meta.at("r_max") == 2.0);
  CHECK(meta.at("shots").is_null());
  CHECK(meta.at("depth") == 1);

  // Re-running into a second directory reproduces the bytes.
  lj["output_dir"] = (dir / "land_b").string();
  io::write_json_file(cfg_land.string(), lj);
  REQUIRE(run_cli_binary("landscape --config " + cfg_land.string()) == 0);
  CHECK(slurp(dir / "land_a" / "landscape.csv") == slurp(dir / "land_b" / "landscape.csv"));

  // Shot-sampled variant echoes its shot count and stays deterministic.
  lj["output_dir"] = (dir / "land_s1").string();
  lj["landscape"]["shots"] = 16;
  io::write_json_file(cfg_land.string(), lj);
  REQUIRE(run_cli_binary("landscape --config " + cfg_land.string()) == 0);
  lj["output_dir"] = (dir / "land_s2").string();
  io::write_json_file(cfg_land.string(), lj);
  REQUIRE(run_cli_binary("landscape --config " + cfg_land.string()) == 0);
  const io::json smeta = io::read_json_file((dir / "land_s1" / "landscape.json").string());
  CHECK(smeta.at("shots") == 16);
  CHECK(slurp(dir / "land_s1" / "landscape.csv") ==
        slurp(dir / "land_s2" / "landscape.csv"));

  // A checkpoint from a different schema version is refused.
  io::json stale = io::read_json_file((out_train / "checkpoint.json").string());
  stale["schema_version"] = 99;
  const fs::path stale_path = dir / "stale_checkpoint.json";
  io::write_json_file(stale_path.string(), stale);
  lj["output_dir"] = (dir / "land_x").string();
  lj["landscape"]["checkpoint"] = stale_path.string();
  io::write_json_file(cfg_land.string(), lj);
  CHECK(run_cli_binary("landscape --config " + cfg_land.string()) == 1);
}

TEST_CASE("calibrate command recovers the planted constants") {
  const fs::path dir = fresh_dir("calibrate");
  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["output_dir"] = (dir / "out").string();
  j["calibrate"] = {{"noise", 0.01}};
  const fs::path cfg = write_config(dir, j);
  REQUIRE(run_cli_binary("calibrate --config " + cfg.string() + " --seed 3") == 0);
  CHECK(fs::exists(dir / "out" / "sweep.csv"));
  const io::json fit = io::read_json_file((dir / "out" / "fit.json").string());
  CHECK(fit.at("chi_rel_error").get<double>() < 0.05);
  CHECK(fit.at("s_rel_error").get<double>() < 0.05);
  CHECK(fit.at("per_amplitude").size() == 7);

  // An impossible residual threshold surfaces as a nonzero exit code.
  io::json bad = j;
  bad["output_dir"] = (dir / "bad").string();
  bad["calibrate"]["residual_threshold"] = 1e-9;
  const fs::path cfg_bad = dir / "bad.json";
  io::write_json_file(cfg_bad.string(), bad);
  CHECK(run_cli_binary("calibrate --config " + cfg_bad.string() + " --seed 3") == 1);
  CHECK_FALSE(fs::exists(dir / "bad" / "fit.json"));
}

TEST_CASE("benchmark command emits one row per protocol and winding") {
  const fs::path dir = fresh_dir("benchmark");
  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["output_dir"] = (dir / "out").string();
  j["task"] = {{"kind", "spiral"}};
  j["protocol"] = {{"n_fock", 24}};
  j["train"] = {{"epochs", 15}, {"restarts", 1}, {"train_size", 16}, {"test_size", 16}};
  j["benchmark"] = {{"winding_values", {0.5}},
                    {"qcds_depths", {1}},
                    {"mlp_epochs", 60},
                    {"mlp_train_size", 32},
                    {"mlp_test_size", 32}};
  j["baselines"] = {{{"name", "noiseless_mlp"}}};
  const fs::path cfg = write_config(dir, j);
  REQUIRE(run_cli_binary("benchmark --config " + cfg.string()) == 0);

  const std::string csv = slurp(dir / "out" / "benchmark.csv");
  CHECK(count_lines_crlf(csv) == 3);  // header + qcds + noiseless_mlp
  CHECK(csv.rfind("protocol,W,accuracy,stderr\r\n", 0) == 0);
  CHECK(csv.find("qcds,0.5,") != std::string::npos);
  CHECK(csv.find("noiseless_mlp,0.5,") != std::string::npos);
  const io::json meta = io::read_json_file((dir / "out" / "benchmark.json").string());
  CHECK(meta.at("failures").empty());

  // A failing baseline is isolated as a nan row, not a crash.
  io::json j_fail = j;
  j_fail["output_dir"] = (dir / "fail").string();
  j_fail["baselines"] = {{{"name", "gkp_ion"}, {"eta", 1.5}}};
  const fs::path cfg_fail = dir / "fail.json";
  io::write_json_file(cfg_fail.string(), j_fail);
  CHECK(run_cli_binary("benchmark --config " + cfg_fail.string()) == 1);
  const std::string fail_csv = slurp(dir / "fail" / "benchmark.csv");
  CHECK(fail_csv.find("gkp_ion,0.5,nan,nan") != std::string::npos);
  CHECK(fail_csv.find("qcds,0.5,") != std::string::npos);
  const io::json fail_meta = io::read_json_file((dir / "fail" / "benchmark.json").string());
  CHECK(fail_meta.at("failures").size() == 1);

  // Guard rails: the sweep needs baselines and the spiral family.
  io::json j_empty = j;
  j_empty["baselines"] = io::json::array();
  j_empty["output_dir"] = (dir / "empty").string();
  const fs::path cfg_empty = dir / "empty.json";
  io::write_json_file(cfg_empty.string(), j_empty);
  CHECK(run_cli_binary("benchmark --config " + cfg_empty.string()) == 1);

  io::json j_task = j;
  j_task["task"] = {{"kind", "two_point"}};
  j_task["output_dir"] = (dir / "task").string();
  const fs::path cfg_task = dir / "task.json";
  io::write_json_file(cfg_task.string(), j_task);
  CHECK(run_cli_binary("benchmark --config " + cfg_task.string()) == 1);
}

TEST_CASE("gen-dataset exports a deterministic csv") {
  const fs::path dir = fresh_dir("dataset");
  io::json j;
  j["schema_version"] = config::kSchemaVersion;
  j["output_dir"] = (dir / "a").string();
  j["task"] = {{"kind", "spiral"}, {"winding", 1.5}};
  j["train"] = {{"train_size", 64}};
  const fs::path cfg = write_config(dir, j);
  REQUIRE(run_cli_binary("gen-dataset --config " + cfg.string()) == 0);
  const std::string csv = slurp(dir / "a" / "dataset.csv");
  CHECK(count_lines_crlf(csv) == 65);
  CHECK(csv.rfind("x,p,label\r\n", 0) == 0);

  j["output_dir"] = (dir / "b").string();
  io::write_json_file(cfg.string(), j);
  REQUIRE(run_cli_binary("gen-dataset --config " + cfg.string()) == 0);
  CHECK(csv == slurp(dir / "b" / "dataset.csv"));

  j["output_dir"] = (dir / "c").string();
  io::write_json_file(cfg.string(), j);
  REQUIRE(run_cli_binary("gen-dataset --config " + cfg.string() + " --seed 9") == 0);
  CHECK(csv != slurp(dir / "c" / "dataset.csv"));
}

}  // TEST_SUITE
