// Copyright 2026 The limitclock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "limitclock/config.hpp"
#include "limitclock/io.hpp"
#include "limitclock/runner.hpp"

using namespace limitclock;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("limitclock_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config file grammar") {
  const auto kv = parse_config_text(
      "# clock run\n"
      "[model]\n"
      "n_atoms = 10   # ten atoms\n"
      "gamma=0.1\n"
      "\n"
      "[run]\n"
      "master_seed = 7\n");
  CHECK(kv.at("model.n_atoms") == "10");
  CHECK(kv.at("model.gamma") == "0.1");
  CHECK(kv.at("run.master_seed") == "7");
  CHECK_THROWS_AS(parse_config_text("[model]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("gamma = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\ngamma\n"), ConfigError);
  try {
    parse_config_text("[sim]\nstep = 1\n");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "sim.step");
  }
}

TEST_CASE("every key has a flag") {
  for (const auto& k : config_keys()) {
    CHECK(k.flag.substr(0, 2) == "--");
    CHECK(!k.help.empty());
  }
}

TEST_CASE("grids") {
  const auto g = parse_grid("x", "0:3:0.05");
  CHECK(g.size() == 61);
  CHECK(g.back() == 3.0);
  CHECK(parse_grid("x", "0.1:0.6:0.1")[2] == 0.3);
  CHECK(parse_grid("x", "1, 2.5,4") == std::vector<double>{1, 2.5, 4});
  CHECK_THROWS_AS(parse_grid("x", "1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("x", "0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("x", "a,b"), ConfigError);
}

TEST_CASE("run configuration") {
  auto rc = build_run_config(Command::kTrajectory, {{"model.n_atoms", "10"}, {"model.omega", "6.2832"}});
  CHECK(rc.model.n_atoms == 10);
  CHECK(rc.model.gamma == doctest::Approx(0.1));
  CHECK(rc.sim.t_final > 0.0);
  CHECK(rc.resolved.at("run.command") == "trajectory");
  CHECK(rc.resolved.at("sim.dt") == "auto");

  rc = build_run_config(Command::kTrajectory, {{"model.j", "5"}, {"model.omega", "7"}});
  CHECK(rc.model.n_atoms == 10);
  CHECK_NOTHROW(build_run_config(Command::kTrajectory, {{"model.j", "5"}, {"model.n_atoms", "10"}, {"model.omega", "7"}}));
  CHECK_THROWS_AS(build_run_config(Command::kTrajectory, {{"model.j", "4"}, {"model.n_atoms", "10"}, {"model.omega", "7"}}),
                  ConfigError);

  auto expect_field = [](Command c, KeyValues kv, const std::string& field) {
    try {
      build_run_config(c, kv);
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
    }
  };
  expect_field(Command::kTrajectory, {{"model.omega", "-1"}}, "model.omega");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"model.gamma", "0"}}, "model.gamma");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"sim.dt", "0"}}, "sim.dt");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"sim.dt", "-0.1"}}, "sim.dt");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"run.format", "xml"}}, "run.format");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"model.n_atoms", "2,3"}}, "model.n_atoms");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"run.master_seed", "-3"}}, "run.master_seed");
  expect_field(Command::kTrajectory, {{"model.omega", "1"}, {"clock.hysteresis", "0.7"}}, "hysteresis");
  expect_field(Command::kPrecisionSweep, {{"sweep.ratio_grid", "0.5,1.2"}}, "sweep.ratio_grid");
  expect_field(Command::kEnsemble, {{"run.n_traj", "1"}}, "run.n_traj");

  rc = build_run_config(Command::kPrecisionSweep, {});
  CHECK(rc.n_list == std::vector<int>{1, 2, 3});
  CHECK(rc.ratio_grid.size() == 6);
  rc = build_run_config(Command::kTrajectory, {{"model.omega", "7"}, {"run.master_seed", "18446744073709551615"}});
  CHECK(rc.master_seed == 18446744073709551615ull);
}

TEST_CASE("tables") {
  Table t({"a", "b", "c"});
  t.add_row({0.1, std::int64_t{3}, std::string("x")});
  t.add_row({std::numeric_limits<double>::infinity(), std::int64_t{-1}, std::string("")});
  CHECK(t.to_csv() == "a,b,c\n0.1,3,x\ninf,-1,\n");
  CHECK(t.to_json()[0]["a"].get<double>() == 0.1);
  CHECK(t.to_json()[1]["a"].get<std::string>() == "inf");
  CHECK_THROWS(t.add_row({1.0}));
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("runner writes outputs and a manifest") {
  const auto dir = scratch("ss");
  auto rc = build_run_config(Command::kSteadyState,
                             {{"model.n_atoms", "3,5"}, {"sweep.beta_grid", "0:2:0.5"}, {"run.output_dir", dir.string()}});
  std::ostringstream log;
  const auto summary = run(rc, log);
  REQUIRE(summary.outputs.size() == 1);
  const std::string csv = slurp(dir / "steady_state.csv");
  CHECK(csv.rfind("beta,N,jz_over_n\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  CHECK(csv.find('\r') == std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["outputs"]["steady_state.csv"] == file_checksum(dir / "steady_state.csv"));
  CHECK(manifest["config"]["model.n_atoms"] == "3,5");
  CHECK(manifest.contains("wall_time_s"));
  CHECK(manifest["toolkit_version"] == std::string(kToolkitVersion));

  rc.format = OutputFormat::kJson;
  run(rc, log);
  const auto doc = nlohmann::json::parse(slurp(dir / "steady_state.json"));
  CHECK(doc.size() == 10);
}

TEST_CASE("failures finalize the manifest") {
  const auto dir = scratch("fail");
  auto rc = build_run_config(Command::kKur, {{"model.n_atoms", "25"}, {"run.output_dir", dir.string()}});
  std::ostringstream log;
  CHECK_THROWS_AS(run(rc, log), ConfigError);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["error"].get<std::string>().find("model.n_atoms") != std::string::npos);
}

TEST_CASE("sweep outputs do not depend on the worker count") {
  std::string first;
  for (const char* threads : {"1", "2", "8"}) {
    const auto dir = scratch(std::string("det") + threads);
    auto rc = build_run_config(Command::kPrecisionSweep, {{"model.n_atoms", "2"},
                                                          {"sweep.ratio_grid", "0.2,0.4"},
                                                          {"sweep.periods_per_point", "60"},
                                                          {"clock.periods_per_trajectory", "10"},
                                                          {"sweep.bootstrap", "50"},
                                                          {"run.threads", threads},
                                                          {"run.output_dir", dir.string()}});
    std::ostringstream log;
    run(rc, log);
    const std::string now = slurp(dir / "precision.csv") + slurp(dir / "kur_sweep.csv");
    if (first.empty()) first = now;
    CHECK(now == first);
  }
}

TEST_CASE("pooled periods") {
  SmeConfig cfg;
  cfg.params.n_atoms = 2;
  cfg.params.gamma = 1.0;
  cfg.params.omega = 5.0;
  cfg.t_final = trajectory_duration(cfg.params, 10, 2);
  const auto a = pooled_periods(cfg, {}, 100, 99, 1);
  const auto b = pooled_periods(cfg, {}, 100, 99, 3);
  CHECK(a.periods.size() == 100);
  CHECK(a.periods == b.periods);
  CHECK(a.n_traj % 8 == 0);
  CHECK(pooled_periods(cfg, {}, 100, 98, 1).periods != a.periods);
  ModelParams below;
  below.n_atoms = 4;
  below.omega = 1.0;
  CHECK_THROWS_AS(trajectory_duration(below, 10, 2), ConfigError);
}
