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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "limitclock/master_eq.hpp"
#include "limitclock/spin_ops.hpp"

namespace limitclock {

enum class Engine { kPureState, kDensityMatrix };

/// Homodyne-conditioned simulation settings.
struct SmeConfig {
  ModelParams params;
  /// Integrator step; 0 selects default_time_step(params).
  double dt = 0.0;
  double t_final = 1.0;
  /// Record every `record_stride`-th step.
  int record_stride = 10;
  /// Defaults to |j,-j>.
  std::optional<Vector> initial_state;
  Engine engine = Engine::kPureState;

  double resolved_dt() const;
  void validate() const;
  /// Non-fatal diagnostics, e.g. a step coarser than 1/200 of the limit-cycle period.
  std::vector<std::string> warnings() const;
};

/// Half a thousandth of the limit-cycle period above threshold, further
/// capped so that (Omega j + gamma j(j+1)) dt <= 0.03.
double default_time_step(const ModelParams& params);

/// Operators shared by every step of a trajectory. Immutable once built.
class SmeModel {
 public:
  explicit SmeModel(const ModelParams& params);

  const ModelParams& params() const noexcept { return params_; }
  const SpinOperatorSet& ops() const noexcept { return ops_; }
  /// Measurement operator sqrt(gamma) e^{i phi} J-.
  const Matrix& c() const noexcept { return c_; }
  /// -i Omega Jx - (1/2) c^dagger c.
  const Matrix& h_eff() const noexcept { return h_eff_; }
  const Matrix& jpjm() const noexcept { return jpjm_; }
  const Matrix& casimir() const noexcept { return casimir_; }
  /// J- e^{i phi} + J+ e^{-i phi}.
  const Matrix& quadrature() const noexcept { return quadrature_; }

 private:
  ModelParams params_;
  SpinOperatorSet ops_;
  Matrix c_, h_eff_, jpjm_, casimir_, quadrature_;
};

/// One first-order step of
///   d rho = L rho dt + sqrt(gamma) dW H[J- e^{i phi}] rho,
///   H[A] rho = A rho + rho A^dagger - Tr[A rho + rho A^dagger] rho,
/// in Kraus form M rho M^dagger (see sme.cpp), followed by Hermitization and
/// trace renormalization. Throws NumericError if an eigenvalue drops below -1e-6.
DensityMatrix sme_step(const DensityMatrix& rho, double dw, const SmeModel& model, double dt);

/// Pure-state unravelling of the same equation with c = sqrt(gamma) e^{i phi} J-
/// and x = <c + c^dagger>:
///   d psi = [H_eff + (x/2) c - x^2/8] psi dt + (c - x/2) psi dW,
/// integrated with a Milstein step and renormalized. Throws NumericError on
/// norm collapse.
PureState sse_step(const PureState& psi, double dw, const SmeModel& model, double dt);

/// J dt = gamma <J- e^{i phi} + J+ e^{-i phi}>_c dt + sqrt(gamma) dW, returned as J.
double homodyne_current_sample(double quadrature_mean, double dw, double dt, double gamma);

/// Conditioned moments sampled every record_stride steps, including t = 0.
/// current[k] and dw[k] cover the interval (t[k-1], t[k]]; current[0] is the
/// noise-free signal of the initial state and dw[0] = 0.
struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<double> jx, jy, jz;
  std::vector<double> jpjm;     // <J+J->_c
  std::vector<double> casimir;  // <Jx^2 + Jy^2 + Jz^2>_c
  std::vector<double> current;
  std::vector<double> dw;
  std::vector<double> purity;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return t.size(); }
};

/// Deterministic in (config, seed): increments are Normal(0, dt) drawn from
/// CounterRng(seed).
TrajectoryRecord simulate_trajectory(const SmeConfig& config, std::uint64_t seed);

/// Same integration driven by caller-supplied increments; the number of steps
/// is increments.size().
TrajectoryRecord simulate_with_increments(const SmeConfig& config, std::span<const double> increments);

/// Order-fixed ensemble average of the conditioned first moments.
struct EnsembleMoments {
  std::vector<double> t;
  std::vector<double> mean_jx, mean_jy, mean_jz;
  std::vector<double> se_jx, se_jy, se_jz;
  int n_traj = 0;
  std::uint64_t master_seed = 0;
};

/// Trajectory i uses seed substream_key(master_seed, i). Results do not
/// depend on `threads`.
EnsembleMoments ensemble_mean(const SmeConfig& config, int n_traj, std::uint64_t master_seed,
                              unsigned threads = 1);

}  // namespace limitclock
