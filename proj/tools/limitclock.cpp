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

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "limitclock/config.hpp"
#include "limitclock/runner.hpp"

namespace {

using limitclock::Command;

struct Subcommand {
  Command command;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> flags;  // "section.key" -> value
  bool simulate = false;
};

const char* kDescriptions[] = {
    "steady-state <Jz>/N versus beta = Omega/Omega0",
    "mean-field Bloch trajectory",
    "conditioned homodyne trajectories with clock extraction",
    "ensemble mean of trajectories against the master equation",
    "clock precision versus Omega0/Omega with uncertainty-relation ratios",
    "kinetic terms of the uncertainty relations",
    "energy dissipated per clock cycle",
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective-spin limit-cycle clock toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(limitclock::kToolkitVersion));

  const Command commands[] = {Command::kSteadyState, Command::kSemiclassical, Command::kTrajectory,
                              Command::kEnsemble,    Command::kPrecisionSweep, Command::kKur,
                              Command::kThermo};
  std::vector<Subcommand> subs;
  subs.reserve(std::size(commands));
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    Subcommand& s = subs.emplace_back();
    s.command = commands[i];
    s.app = app.add_subcommand(std::string(limitclock::command_name(commands[i])), kDescriptions[i]);
    s.app->add_option("--config,-c", s.config_file, "key-value config file")->check(CLI::ExistingFile);
    for (const auto& k : limitclock::config_keys()) {
      const std::string full = std::string(k.section) + "." + std::string(k.key);
      std::string names = std::string(k.flag);
      if (!k.alias.empty()) names += "," + std::string(k.alias);
      if (full == "sweep.simulate") {
        s.app->add_flag(names, s.simulate, std::string(k.help));
        continue;
      }
      s.app->add_option_function<std::string>(
          names, [&s, full](const std::string& v) { s.flags[full] = v; }, std::string(k.help));
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (Subcommand& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      limitclock::KeyValues kv;
      if (!s.config_file.empty()) kv = limitclock::read_config_file(s.config_file);
      if (const char* env = std::getenv("LIMITCLOCK_OUTPUT_DIR"); env && *env) kv["run.output_dir"] = env;
      for (const auto& [key, value] : s.flags) kv[key] = value;
      if (s.simulate) kv["sweep.simulate"] = "true";
      const limitclock::RunConfig config = limitclock::build_run_config(s.command, kv);
      const auto summary = limitclock::run(config, std::cerr);
      for (const auto& path : summary.outputs) std::cout << path.string() << "\n";
      return 0;
    } catch (const limitclock::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const limitclock::NumericError& e) {
      std::cerr << "numeric failure: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
