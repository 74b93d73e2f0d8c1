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
#include <iosfwd>
#include <string>
#include <vector>

#include "limitclock/clock.hpp"
#include "limitclock/config.hpp"
#include "limitclock/sme.hpp"

namespace limitclock {

inline constexpr std::string_view kToolkitVersion = "0.3.0";

/// Duration that yields roughly `periods` limit-cycle periods after
/// `discard` transient ones.
double trajectory_duration(const ModelParams& params, int periods, int discard);

struct PooledPeriods {
  std::vector<double> periods;
  /// (trajectory index, period) for every pooled sample, in pooling order.
  std::vector<std::size_t> trajectory_index;
  int n_traj = 0;
  std::vector<std::string> warnings;
};

/// Simulates trajectories in fixed batches of eight until `target` periods are
/// pooled, then truncates to exactly `target`. Trajectory i uses substream i of
/// `master_seed`, so the result does not depend on `threads`. Gives up after
/// `max_traj` trajectories and returns whatever was collected.
PooledPeriods pooled_periods(const SmeConfig& base, const ClockSignalConfig& clock, int target,
                             std::uint64_t master_seed, unsigned threads, int max_traj = 4096);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> warnings;
};

/// Executes one command and writes its outputs plus manifest.json under
/// config.output_dir. Throws ConfigError or NumericError on failure; the
/// manifest is finalized with the error in either case.
RunSummary run(const RunConfig& config, std::ostream& log);

}  // namespace limitclock
