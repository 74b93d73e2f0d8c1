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
#include <span>
#include <string>
#include <vector>

namespace limitclock {

struct ClockSignalConfig {
  /// Schmitt thresholds at +/- hysteresis * j on <Jz>_c; 0 reproduces
  /// (sign(<Jz>_c) + 1)/2.
  double hysteresis = 0.25;
  /// Leading periods dropped from every trajectory.
  int discard_transient = 2;

  void validate() const;
};

/// Binary clock signal. With h = 0 an exact zero holds the previous level
/// (the first sample counts as low); with h > 0 the level drops only below
/// -h j and rises only above +h j.
std::vector<std::uint8_t> clock_signal(std::span<const double> jz, double j, const ClockSignalConfig& config);

struct ClockEdges {
  std::vector<double> falling;
  std::vector<double> rising;
};

/// Edge times of clock_signal, linearly interpolated to the threshold
/// crossing between the bracketing samples.
ClockEdges detect_edges(std::span<const double> jz, std::span<const double> t, double j,
                        const ClockSignalConfig& config);

struct PeriodExtraction {
  /// Consecutive falling-edge differences after the transient.
  std::vector<double> periods;
  /// Falling edges that bound the retained periods (periods.size() + 1 of them).
  std::vector<double> edges;
  std::string warning;
};

PeriodExtraction extract_periods(std::span<const double> jz, std::span<const double> t, double j,
                                 const ClockSignalConfig& config);

struct ClockStatistics {
  std::vector<double> periods;
  double mean_t = 0.0;
  double var_t = 0.0;    // unbiased
  double n_prec = 0.0;   // mean^2 / var; +inf when var == 0
  std::size_t n_samples = 0;
  double se_mean = 0.0;  // bootstrap standard errors
  double se_var = 0.0;
  double se_nprec = 0.0;
  /// Bootstrap standard error of n_prec / mean_t = mean_t / var_t, the
  /// quantity both KUR ratios are proportional to.
  double se_nprec_per_mean = 0.0;
};

/// Throws std::invalid_argument for fewer than 2 samples.
ClockStatistics period_statistics(std::span<const double> periods, int n_bootstrap = 1000,
                                  std::uint64_t bootstrap_seed = 0x5eed);

struct RankCorrelation {
  double rho = 0.0;
  /// Two-sided; exact permutation distribution for n <= 9, Student t otherwise.
  double p_value = 1.0;
};
RankCorrelation spearman(std::span<const double> x, std::span<const double> y);

}  // namespace limitclock
