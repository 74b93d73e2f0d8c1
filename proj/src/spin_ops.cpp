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

#include "limitclock/spin_ops.hpp"

#include <algorithm>
#include <cmath>

namespace limitclock {

SpinOperatorSet build_collective_ops(int n_atoms) {
  if (n_atoms < 1) {
    throw ConfigError("n_atoms", "must be a positive integer, got " + std::to_string(n_atoms));
  }
  SpinOperatorSet ops;
  ops.n_atoms = n_atoms;
  ops.j = 0.5 * n_atoms;
  ops.dim = n_atoms + 1;
  const int d = ops.dim;
  const double j = ops.j;

  ops.jz = Matrix::Zero(d, d);
  ops.jp = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = k - j;
    ops.jz(k, k) = m;
    if (k + 1 < d) ops.jp(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  ops.jm = ops.jp.adjoint();
  ops.jx = 0.5 * (ops.jp + ops.jm);
  ops.jy = Complex(0.0, -0.5) * (ops.jp - ops.jm);
  return ops;
}

int n_atoms_from_j(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!(j > 0.0) || std::abs(twice - rounded) > 1e-9) {
    throw ConfigError("j", "must be a positive half-integer");
  }
  return static_cast<int>(rounded);
}

DensityMatrix::DensityMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: data must be square and non-empty");
  }
}

double DensityMatrix::purity() const { return (data_ * data_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double trace_tol, double eig_tol) const {
  const double herm_err = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-10) {
    throw NumericError("density matrix not Hermitian (residual " + std::to_string(herm_err) + ")");
  }
  const Complex tr = data_.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw NumericError("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  const double lmin = min_eigenvalue();
  if (lmin < -eig_tol) {
    throw NumericError("density matrix has eigenvalue " + std::to_string(lmin));
  }
}

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  const double n = amps_.norm();
  if (!(n > 0.0)) throw NumericError("PureState: zero-norm amplitude vector");
  amps_ /= n;
}

PureState PureState::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw std::out_of_range("PureState::basis index");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix PureState::to_density() const { return DensityMatrix(amps_ * amps_.adjoint()); }

namespace {

void check_dims(Eigen::Index state_dim, const Matrix& op) {
  if (op.rows() != state_dim || op.cols() != state_dim) {
    throw std::invalid_argument("expectation: operator is " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + ", state dimension " +
                                std::to_string(state_dim));
  }
}

double real_part_checked(Complex v, const Matrix& op) {
  const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  if (std::abs(v.imag()) > 1e-10 * scale) {
    throw NumericError("expectation of Hermitian operator has imaginary part " +
                       std::to_string(v.imag()));
  }
  return v.real();
}

}  // namespace

Complex expectation(const DensityMatrix& state, const Matrix& op) {
  check_dims(state.dim(), op);
  // Tr[op rho] without forming the product.
  return (op.transpose().cwiseProduct(state.matrix())).sum();
}

Complex expectation(const PureState& state, const Matrix& op) {
  check_dims(state.dim(), op);
  return state.amplitudes().dot(op * state.amplitudes());
}

double expectation_real(const DensityMatrix& state, const Matrix& op) {
  return real_part_checked(expectation(state, op), op);
}

double expectation_real(const PureState& state, const Matrix& op) {
  return real_part_checked(expectation(state, op), op);
}

double jpjm_identity_check(const SpinOperatorSet& ops) {
  const Matrix id = Matrix::Identity(ops.dim, ops.dim);
  const Matrix rhs = ops.j * (ops.j + 1.0) * id - ops.jz * ops.jz + ops.jz;
  return (ops.jp * ops.jm - rhs).cwiseAbs().maxCoeff();
}

double casimir_residual(const SpinOperatorSet& ops) {
  const Matrix id = Matrix::Identity(ops.dim, ops.dim);
  const Matrix c2 = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
  return (c2 - ops.j * (ops.j + 1.0) * id).cwiseAbs().maxCoeff();
}

double commutator_residual(const SpinOperatorSet& ops) {
  const Complex i(0.0, 1.0);
  const double a = (ops.jx * ops.jy - ops.jy * ops.jx - i * ops.jz).norm();
  const double b = (ops.jy * ops.jz - ops.jz * ops.jy - i * ops.jx).norm();
  const double c = (ops.jz * ops.jx - ops.jx * ops.jz - i * ops.jy).norm();
  return std::max({a, b, c});
}

}  // namespace limitclock
