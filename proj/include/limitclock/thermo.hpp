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

#include <span>
#include <vector>

#include "limitclock/master_eq.hpp"
#include "limitclock/sme.hpp"

namespace limitclock {

/// Energies in units of hbar*omega_a (omega_a = 1 by default).
struct PowerBalance {
  double p_in = 0.0;   // hbar w_a Omega <Jy>
  double p_out = 0.0;  // hbar w_a gamma <J+J->
  double de_dt = 0.0;  // p_in - p_out
};

PowerBalance power_balance(const DensityMatrix& state, const SpinOperatorSet& ops, const ModelParams& params);
PowerBalance power_balance(const PureState& state, const SpinOperatorSet& ops, const ModelParams& params);

/// hbar w_a Tr[Jz L rho]; equals power_balance(...).de_dt identically.
double jz_rate(const DensityMatrix& state, const SpinOperatorSet& ops, const ModelParams& params);

struct EnergyLedger {
  std::vector<double> t;
  std::vector<double> p_in;
  std::vector<double> p_out;
  std::vector<double> e_dis;  // trapezoidal running integral of p_out
};

/// Throws std::invalid_argument if the record lacks <J+J->_c samples.
EnergyLedger dissipated_energy(const TrajectoryRecord& traj, const ModelParams& params);

/// e_dis at time t by linear interpolation.
double ledger_energy_at(const EnergyLedger& ledger, double t);

/// (T_k, dE_k) for consecutive edge times: dE_k is the energy dissipated
/// between edges k and k+1.
struct CyclePairs {
  std::vector<double> periods;
  std::vector<double> delta_e;
};
CyclePairs cycle_pairs(const EnergyLedger& ledger, std::span<const double> edge_times);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
  std::size_t n = 0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct CycleDissipation {
  CyclePairs pairs;
  LinearFit fit;
};

/// OLS of dE on T over pooled cycles; throws std::invalid_argument for fewer
/// than `min_cycles` cycles.
CycleDissipation cycle_dissipation(CyclePairs pairs, std::size_t min_cycles = 50);

}  // namespace limitclock
