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

#include "limitclock/clock.hpp"
#include "limitclock/master_eq.hpp"

namespace limitclock {

/// Largest N for which the Drazin pipeline is offered; the bordered solve
/// scales as (N+1)^6.
inline constexpr int kMaxKurAtoms = 20;

/// gamma * Tr[J+ J- rho_ss], the steady-state photon emission rate.
double dynamical_activity(const DensityMatrix& rho_ss, const SpinOperatorSet& ops, double gamma);

struct CoherenceTerm {
  double value = 0.0;
  /// |Im| of the trace expression; a convention error shows up here.
  double imag_residual = 0.0;
};

/// -4 Tr[L1 L^D L2 rho_ss] - 4 Tr[L2 L^D L1 rho_ss], real part.
CoherenceTerm coherence_correction(const LiouvillianSplit& split, const DrazinSolver& drazin,
                                   const DensityMatrix& rho_ss);

struct KineticTerms {
  double activity = 0.0;
  double coherence = 0.0;
};

/// Closed forms for N = 2 and N = 3. Throws std::invalid_argument otherwise.
KineticTerms analytic_nq(int n_atoms, double omega, double gamma);

/// Activity and coherence from the numerical steady state and Drazin
/// inverse. Throws ConfigError for N > kMaxKurAtoms.
KineticTerms numeric_nq(const ModelParams& params);

/// N / (N + Q) over a grid of Rabi frequencies (1 where both vanish).
std::vector<double> activity_ratio_curve(int n_atoms, double gamma, std::span<const double> omega_grid);

struct KurReport {
  double activity = 0.0;
  double coherence = 0.0;
  double mean_t = 0.0;
  double n_prec = 0.0;
  double qfi = 0.0;  // E[T] (N + Q)
  double classical_ratio = 0.0;
  double quantum_ratio = 0.0;
  double se_classical_ratio = 0.0;
  double se_quantum_ratio = 0.0;
  /// quantum_ratio > 1 + 3 se_quantum_ratio.
  bool quantum_violated = false;
  /// classical_ratio > 1 + 3 se_classical_ratio.
  bool classical_violated = false;
};

/// Throws std::invalid_argument for degenerate statistics (zero variance or
/// non-positive mean).
KurReport kur_test(const ClockStatistics& stats, double activity, double coherence);

}  // namespace limitclock
