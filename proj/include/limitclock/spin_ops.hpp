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

#include "limitclock/types.hpp"

namespace limitclock {

/// Collective angular momentum operators of N two-level atoms restricted to
/// the symmetric (Dicke) subspace.
///
/// Basis ordering is fixed: index k holds the Jz eigenstate with
/// m = k - j, so index 0 is |j,-j> (all atoms in the ground state) and
/// index dim-1 is |j,+j>. Every file the toolkit writes assumes this order.
struct SpinOperatorSet {
  int n_atoms = 0;
  double j = 0.0;
  int dim = 0;
  Matrix jx, jy, jz, jp, jm;
};

/// Builds jz, the ladder operators from
/// <m+1|J+|m> = sqrt(j(j+1) - m(m+1)), and jx, jy from them.
SpinOperatorSet build_collective_ops(int n_atoms);

/// Converts a spin quantum number j to an atom count, rejecting values that
/// are not non-negative half-integers or that give N = 0.
int n_atoms_from_j(double j);

/// Conditional or unconditional state of the Dicke subspace.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix data);

  const Matrix& matrix() const noexcept { return data_; }
  int dim() const noexcept { return static_cast<int>(data_.rows()); }
  double purity() const;
  double min_eigenvalue() const;

  /// Throws NumericError if the matrix is not Hermitian, not unit trace
  /// within `trace_tol`, or has an eigenvalue below -eig_tol.
  void validate(double trace_tol = 1e-12, double eig_tol = 1e-10) const;

 private:
  Matrix data_;
};

class PureState {
 public:
  PureState() = default;
  /// Normalizes the amplitudes; throws if the norm is zero.
  explicit PureState(Vector amplitudes);

  static PureState basis(int dim, int index);
  static PureState ground(int dim) { return basis(dim, 0); }
  static PureState excited(int dim) { return basis(dim, dim - 1); }

  const Vector& amplitudes() const noexcept { return amps_; }
  int dim() const noexcept { return static_cast<int>(amps_.size()); }
  DensityMatrix to_density() const;

 private:
  Vector amps_;
};

/// Tr[op rho] and <psi|op|psi>.
Complex expectation(const DensityMatrix& state, const Matrix& op);
Complex expectation(const PureState& state, const Matrix& op);

/// Real-valued expectation of a Hermitian operator. Throws NumericError if
/// the imaginary part exceeds 1e-10 (relative to the operator scale).
double expectation_real(const DensityMatrix& state, const Matrix& op);
double expectation_real(const PureState& state, const Matrix& op);

/// max |jp jm - (j(j+1) I - jz^2 + jz)|.
double jpjm_identity_check(const SpinOperatorSet& ops);

/// max |jx^2 + jy^2 + jz^2 - j(j+1) I|.
double casimir_residual(const SpinOperatorSet& ops);

/// Largest Frobenius residual of the three cyclic su(2) commutators.
double commutator_residual(const SpinOperatorSet& ops);

}  // namespace limitclock
