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
#include <string>
#include <vector>

#include <Eigen/LU>

#include "limitclock/spin_ops.hpp"
#include "limitclock/types.hpp"

namespace limitclock {

/// Driven collective resonance fluorescence model.
struct ModelParams {
  int n_atoms = 1;
  double omega = 0.0;    // Rabi frequency
  double gamma = 1.0;    // collective emission rate
  double phi = 0.0;      // local-oscillator phase
  double omega_a = 1.0;  // transition frequency; hbar*omega_a is the energy unit

  /// Hopf threshold gamma*N/2.
  double omega0() const { return 0.5 * gamma * n_atoms; }
  double j() const { return 0.5 * n_atoms; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Linear map on column-vectorized dim x dim matrices:
/// vec(A rho B) = (B^T kron A) vec(rho).
struct Superoperator {
  Matrix data;
  int dim = 0;

  Matrix apply(const Matrix& rho) const;
};

Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int dim);

/// Superoperators for X -> A X and X -> X B.
Matrix spre(const Matrix& a);
Matrix spost(const Matrix& b);

/// L rho = -i Omega [Jx, rho] + gamma D[J-] rho.
Superoperator build_liouvillian(const SpinOperatorSet& ops, const ModelParams& params);

/// Right-acting Liouvillian evaluated without the superoperator; the SME
/// engines call this every step.
Matrix apply_liouvillian(const SpinOperatorSet& ops, const ModelParams& params, const Matrix& rho);

/// L = L1 + L2 with
///   L1 rho = -i Omega Jx rho + (gamma/2)(J- rho J+ - J+J- rho)
///   L2 rho = +i Omega rho Jx + (gamma/2)(J- rho J+ - rho J+J-)
/// so that L2 = Theta L1 Theta for Theta(X) = X^dagger.
struct LiouvillianSplit {
  Superoperator l1;
  Superoperator l2;
};
LiouvillianSplit split_liouvillian(const SpinOperatorSet& ops, const ModelParams& params);

enum class Propagator { kExponential, kAdaptiveRk };

/// Propagates rho0 over an increasing time grid starting at 0. The
/// exponential route caches exp(L dt) for repeated step sizes; the adaptive
/// route uses Dormand-Prince at tolerance `rk_tol`.
std::vector<DensityMatrix> evolve_unconditional(const Superoperator& l, const DensityMatrix& rho0,
                                                std::span<const double> t_grid,
                                                Propagator method = Propagator::kExponential,
                                                double rk_tol = 1e-12);

/// Null-space steady state from the bordered system
///   [L  v; tr 0] [x; lambda] = [0; 1],
/// which is nonsingular exactly when the kernel of L is one-dimensional.
DensityMatrix steady_state_numeric(const Superoperator& l, double rcond_floor = 1e-14);

/// Closed-form stationary state rho ~ A A^dagger with
/// A = sum_m (-i Omega/gamma)^(2j-m) J-^m, evaluated entrywise in log
/// magnitude so large N and Omega/gamma do not overflow.
DensityMatrix steady_state_exact(const SpinOperatorSet& ops, const ModelParams& params);

/// 0.5 * trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Drazin inverse of a Liouvillian with a unique steady state.
///
/// Apply(A) returns the X with L X = A - rho_ss Tr[A] and Tr[X] = 0. The
/// bordered matrix is factorized once, so repeated applications cost one
/// triangular solve each.
class DrazinSolver {
 public:
  DrazinSolver(const Superoperator& l, const DensityMatrix& rho_ss, double rcond_floor = 1e-14);

  Matrix apply(const Matrix& a) const;
  Vector apply_vec(const Vector& a) const;
  double rcond() const noexcept { return rcond_; }
  /// Residuals of the most recent apply: |L X - Q A|_F and |Tr X|.
  double last_residual() const noexcept { return last_residual_; }
  double last_trace() const noexcept { return last_trace_; }

 private:
  const Superoperator* l_;
  Vector rho_ss_vec_;
  Vector trace_row_;
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_ = 0.0;
  mutable double last_residual_ = 0.0;
  mutable double last_trace_ = 0.0;
};

Matrix drazin_apply(const Superoperator& l, const DensityMatrix& rho_ss, const Matrix& a);

/// One row of the sweep of <Jz>/N versus beta = Omega/Omega0.
struct SteadyStatePoint {
  double beta = 0.0;
  int n_atoms = 0;
  double jz_over_n = 0.0;
};
std::vector<SteadyStatePoint> steady_state_sweep(std::span<const int> n_atoms, double gamma,
                                                 std::span<const double> betas);

}  // namespace limitclock
