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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "limitclock/clock.hpp"
#include "limitclock/master_eq.hpp"
#include "limitclock/sme.hpp"

namespace limitclock {

enum class Command { kSteadyState, kSemiclassical, kTrajectory, kEnsemble, kPrecisionSweep, kKur, kThermo };
enum class OutputFormat { kCsv, kJson };

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

/// One configuration key. Files address it as `section.key` inside a
/// `[section]` block; every key also has a long flag.
struct KeySpec {
  std::string_view section;
  std::string_view key;
  std::string_view flag;   // e.g. "--gamma"
  std::string_view alias;  // optional second flag, e.g. "--n"
  std::string_view help;
};

const std::vector<KeySpec>& config_keys();

/// "section.key" -> raw value.
using KeyValues = std::map<std::string, std::string>;

/// Parses the flat key-value format:
///
///   # comment
///   [model]
///   n_atoms = 10
///   gamma = 0.1
///
/// Unknown sections or keys raise ConfigError.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// "a:b:step" (inclusive of b up to rounding) or a comma-separated list.
std::vector<double> parse_grid(std::string_view field, std::string_view text);

struct RunConfig {
  Command command = Command::kTrajectory;
  ModelParams model;
  /// Atom counts for sweep commands; single-run commands use model.n_atoms.
  std::vector<int> n_list;
  SmeConfig sim;
  ClockSignalConfig clock;
  /// "long" pools few long trajectories, "short" many short ones.
  std::string pooling = "long";
  int periods_per_trajectory = 100;
  int n_traj = 1;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "out";
  OutputFormat format = OutputFormat::kCsv;
  unsigned threads = 1;

  std::vector<double> beta_grid;
  std::vector<double> omega_grid;
  std::vector<double> ratio_grid;  // Omega0 / Omega
  int periods_per_point = 10000;
  int bootstrap = 1000;
  bool simulate = false;
  double theta0 = 1.5707963267948966;
  double sample_dt = 0.0;  // semiclassical output spacing; 0 = automatic

  /// Fully resolved key-value echo, used for manifests.
  KeyValues resolved;
};

/// Builds a validated configuration from merged key-values. Missing keys take
/// command-specific defaults. Throws ConfigError naming the field.
RunConfig build_run_config(Command command, const KeyValues& values);

}  // namespace limitclock
