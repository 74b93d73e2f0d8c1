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

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "limitclock/spin_ops.hpp"
#include "oracles.hpp"

using namespace limitclock;

TEST_CASE("spin-1/2 operators") {
  const auto ops = build_collective_ops(1);
  CHECK(ops.dim == 2);
  CHECK(ops.j == doctest::Approx(0.5));
  CHECK(ops.jz(0, 0).real() == doctest::Approx(-0.5));
  CHECK(ops.jz(1, 1).real() == doctest::Approx(0.5));
  CHECK(ops.jp(1, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(ops.jp(0, 1)) == 0.0);
  CHECK(std::abs(ops.jp.sum() - 1.0) < 1e-15);
}

TEST_CASE("N=2 ladder coefficient") {
  const auto ops = build_collective_ops(2);
  CHECK(ops.jp(1, 0).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ops.jp(2, 1).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("operators match the independent ladder construction") {
  for (int n : {1, 2, 3, 7, 10, 20, 70}) {
    const auto ops = build_collective_ops(n);
    const auto ref = oracle::spin(n);
    CHECK((ops.jm - ref.jm).norm() < 1e-12);
    CHECK((ops.jx - ref.jx).norm() < 1e-12);
    CHECK((ops.jy - ref.jy).norm() < 1e-12);
    CHECK((ops.jz - ref.jz).norm() < 1e-12);
  }
}

TEST_CASE("Dicke block reproduces the symmetric sector of the product space") {
  // The largest-j block of the collective operators on 2^n has Casimir j(j+1)
  // with j = n/2; its Jz spectrum must equal that of the Dicke operators.
  for (int n : {2, 3, 4}) {
    const auto full = oracle::tensor_spin(n);
    const Eigen::MatrixXcd cas = full.jx * full.jx + full.jy * full.jy + full.jz * full.jz;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cas);
    const double j = 0.5 * n;
    int top = 0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) top += std::abs(es.eigenvalues()(k) - j * (j + 1)) < 1e-9;
    CHECK(top == n + 1);
    const auto ops = build_collective_ops(n);
    // <J+J-> in the fully excited product state equals the Dicke value.
    const Eigen::MatrixXcd nn = full.jp * full.jm;
    const int all_up = (1 << n) - 1;
    CHECK(nn(all_up, all_up).real() == doctest::Approx((ops.jp * ops.jm)(n, n).real()));
  }
}

TEST_CASE("algebraic residuals") {
  for (int n : {1, 2, 3, 10, 20}) {
    const auto ops = build_collective_ops(n);
    CHECK(commutator_residual(ops) < 1e-12);
    CHECK(casimir_residual(ops) < 1e-12);
  }
  CHECK(jpjm_identity_check(build_collective_ops(1)) < 1e-14);
  CHECK(jpjm_identity_check(build_collective_ops(10)) < 1e-12);
  CHECK(jpjm_identity_check(build_collective_ops(70)) < 1e-10);
  CHECK(commutator_residual(build_collective_ops(70)) < 1e-10);
  CHECK(casimir_residual(build_collective_ops(70)) < 1e-9);
}

TEST_CASE("n_atoms and j conversions") {
  CHECK(n_atoms_from_j(0.5) == 1);
  CHECK(n_atoms_from_j(12) == 24);
  CHECK_THROWS_AS(n_atoms_from_j(0.3), ConfigError);
  CHECK_THROWS_AS(n_atoms_from_j(0.0), ConfigError);
  CHECK_THROWS_AS(build_collective_ops(0), ConfigError);
}

TEST_CASE("expectations") {
  const int n = 6;
  const auto ops = build_collective_ops(n);
  const auto g = PureState::ground(ops.dim);
  CHECK(expectation_real(g, ops.jz) == doctest::Approx(-n / 2.0));
  CHECK(std::abs(expectation_real(g, ops.jp * ops.jm)) < 1e-15);
  CHECK(expectation_real(g.to_density(), ops.jz) == doctest::Approx(-n / 2.0));

  const DensityMatrix mixed(Eigen::MatrixXcd::Identity(ops.dim, ops.dim) / double(ops.dim));
  CHECK(std::abs(expectation_real(mixed, ops.jz)) < 1e-15);
  CHECK(mixed.purity() == doctest::Approx(1.0 / ops.dim));

  const auto e = PureState::excited(ops.dim);
  CHECK(expectation_real(e, ops.jz) == doctest::Approx(n / 2.0));
  CHECK(expectation_real(e, ops.jp * ops.jm) == doctest::Approx(n));

  Eigen::MatrixXcd wrong = Eigen::MatrixXcd::Identity(3, 3);
  CHECK_THROWS(expectation(g, wrong));
  // jp is not Hermitian: a complex expectation is fine, a real one is not.
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(ops.dim);
  const PureState s(v);
  CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(expectation_real(s, Complex(0, 1) * ops.jx), NumericError);
}

TEST_CASE("density matrix validation") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix(m).validate());
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix(m).validate(), NumericError);
  m(0, 0) = 0.6;
  m(1, 1) = 0.6;
  CHECK_THROWS_AS(DensityMatrix(m).validate(), NumericError);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix(m).validate(), NumericError);
  CHECK_THROWS_AS(PureState(Eigen::VectorXcd::Zero(3)), NumericError);
}
