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

#include "limitclock/kur.hpp"

#include <cmath>
#include <complex>

#include <Eigen/LU>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <stdexcept>
#include <string>

namespace limitclock {

double dynamical_activity(const DensityMatrix& rho_ss, const SpinOperatorSet& ops, double gamma) {
  return gamma * expectation_real(rho_ss, ops.jp * ops.jm);
}

CoherenceTerm coherence_correction(const LiouvillianSplit& split, const DrazinSolver& drazin,
                                   const DensityMatrix& rho_ss) {
  const int d = split.l1.dim;
  const Vector rho = vectorize(rho_ss.matrix());
  Vector trace_row = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k < d; ++k) trace_row(static_cast<Eigen::Index>(k) * d + k) = 1.0;

  const Vector a = split.l1.data * drazin.apply_vec(split.l2.data * rho);
  const Vector b = split.l2.data * drazin.apply_vec(split.l1.data * rho);
  const Complex q = -4.0 * (trace_row.dot(a) + trace_row.dot(b));
  return {q.real(), std::abs(q.imag())};
}

KineticTerms analytic_nq(int n_atoms, double omega, double gamma) {
  const double g = gamma, w = omega;
  const double g2 = g * g, w2 = w * w;
  if (n_atoms == 2) {
    const double act = 4 * g * w2 * (g2 + w2) / (4 * g2 * g2 + 4 * g2 * w2 + 3 * w2 * w2);
    const double w6 = w2 * w2 * w2;
    const double coh = 32 * (3 * g2 * w6 + w6 * w2) /
                       (16 * std::pow(g, 7) + 20 * std::pow(g, 5) * w2 + 16 * g2 * g * w2 * w2 + 3 * g * w6);
    return {act, coh};
  }
  if (n_atoms == 3) {
    const double w4 = w2 * w2, w6 = w4 * w2, w8 = w4 * w4;
    const double act = g * w2 * (18 * g2 * g2 + 12 * g2 * w2 + 5 * w4) /
                       (18 * std::pow(g, 6) + 12 * g2 * g2 * w2 + 5 * g2 * w4 + 2 * w6);
    const double coh = 8 * w8 * (1323 * g2 * g2 + 468 * g2 * w2 + 80 * w4) /
                       (7938 * std::pow(g, 11) + 7668 * std::pow(g, 9) * w2 + 4077 * std::pow(g, 7) * w4 +
                        1734 * std::pow(g, 5) * w6 + 344 * g2 * g * w8 + 32 * g * w8 * w2);
    return {act, coh};
  }
  throw std::invalid_argument("analytic_nq: closed forms exist for N = 2 and N = 3 only, got " +
                              std::to_string(n_atoms));
}

namespace {

// The coherence term is a small difference of O(Omega^2) contributions when
// Omega << gamma, so the solves are repeated in quad precision for small
// systems and in long double above that.
constexpr int kQuadAtoms = 8;

template <class XComplex>
using XMatrix = Eigen::Matrix<XComplex, Eigen::Dynamic, Eigen::Dynamic>;
template <class XComplex>
using XVector = Eigen::Matrix<XComplex, Eigen::Dynamic, 1>;

template <class XComplex>
XMatrix<XComplex> kron(const XMatrix<XComplex>& a, const XMatrix<XComplex>& b) {
  XMatrix<XComplex> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

template <class XReal, class XComplex>
KineticTerms kinetic_extended(const ModelParams& params) {
  using M = XMatrix<XComplex>;
  using V = XVector<XComplex>;
  const int n = params.n_atoms;
  const int d = n + 1;
  const XReal j = XReal(n) / 2;
  M jm = M::Zero(d, d);
  for (int k = 1; k < d; ++k) {
    const XReal m = XReal(k - 1) - j;
    const XReal c2 = j * (j + 1) - m * (m + 1);
    jm(k - 1, k) = XComplex(XReal(sqrt(c2)));
  }
  const M jp = jm.adjoint();
  const M jx = (jp + jm) * XComplex(XReal(0.5));
  const M nn = jp * jm;
  const M eye = M::Identity(d, d);
  const XComplex g(XReal(params.gamma)), half_g(XReal(params.gamma) / 2);
  const XComplex mi(XReal(0), -XReal(params.omega));

  // vec(A X B) = (B^T kron A) vec(X), column-major.
  const M jump = kron<XComplex>(jp.transpose(), jm) * half_g;
  const M l1 = kron<XComplex>(eye, jx) * mi + jump - kron<XComplex>(eye, nn) * half_g;
  const M l2 = kron<XComplex>(jx.transpose(), eye) * (-mi) + jump - kron<XComplex>(nn.transpose(), eye) * half_g;
  const M l = l1 + l2;

  const Eigen::Index sz = static_cast<Eigen::Index>(d) * d;
  V trace_row = V::Zero(sz);
  for (int k = 0; k < d; ++k) trace_row(static_cast<Eigen::Index>(k) * d + k) = XComplex(XReal(1));
  M bordered = M::Zero(sz + 1, sz + 1);
  bordered.topLeftCorner(sz, sz) = l;
  bordered.block(0, sz, sz, 1) = trace_row * XComplex(XReal(1) / XReal(d));
  bordered.block(sz, 0, 1, sz) = trace_row.transpose();
  const Eigen::PartialPivLU<M> lu(bordered);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(static_cast<double>(pivots.minCoeff() / pivots.maxCoeff()) > 1e-14)) {
    throw NumericError("numeric_nq: ill-conditioned Liouvillian");
  }

  V rhs = V::Zero(sz + 1);
  rhs(sz) = XComplex(XReal(1));
  V rho = lu.solve(rhs).head(sz);
  rho /= trace_row.dot(rho);

  auto drazin = [&](const V& a) {
    V r(sz + 1);
    r.head(sz) = a - rho * trace_row.dot(a);
    r(sz) = XComplex(XReal(0));
    return V(lu.solve(r).head(sz));
  };
  const XComplex q = XComplex(XReal(-4)) * (trace_row.dot(l1 * drazin(l2 * rho)) + trace_row.dot(l2 * drazin(l1 * rho)));
  const XComplex act = g * trace_row.dot(kron<XComplex>(eye, nn) * rho);
  return {static_cast<double>(XReal(real(act))), static_cast<double>(XReal(real(q)))};
}

}  // namespace

KineticTerms numeric_nq(const ModelParams& params) {
  params.validate();
  if (params.n_atoms > kMaxKurAtoms) {
    throw ConfigError("n_atoms", "KUR terms are computed for N <= " + std::to_string(kMaxKurAtoms));
  }
  if (params.n_atoms <= kQuadAtoms) {
    return kinetic_extended<boost::multiprecision::cpp_bin_float_quad, boost::multiprecision::cpp_complex_quad>(params);
  }
  return kinetic_extended<long double, std::complex<long double>>(params);
}

std::vector<double> activity_ratio_curve(int n_atoms, double gamma, std::span<const double> omega_grid) {
  std::vector<double> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    ModelParams p;
    p.n_atoms = n_atoms;
    p.gamma = gamma;
    p.omega = w;
    const KineticTerms k = numeric_nq(p);
    const double total = k.activity + k.coherence;
    out.push_back(total > 0.0 ? k.activity / total : 1.0);
  }
  return out;
}

KurReport kur_test(const ClockStatistics& stats, double activity, double coherence) {
  if (!(stats.var_t > 0.0) || !(stats.mean_t > 0.0) || !std::isfinite(stats.n_prec)) {
    throw std::invalid_argument("kur_test: degenerate period statistics");
  }
  KurReport r;
  r.activity = activity;
  r.coherence = coherence;
  r.mean_t = stats.mean_t;
  r.n_prec = stats.n_prec;
  r.qfi = stats.mean_t * (activity + coherence);
  r.classical_ratio = stats.n_prec / (stats.mean_t * activity);
  r.quantum_ratio = stats.n_prec / r.qfi;
  // n_prec / E[T] = E[T] / Var[T]; its bootstrap error carries both ratios.
  r.se_classical_ratio = stats.se_nprec_per_mean / activity;
  r.se_quantum_ratio = stats.se_nprec_per_mean / (activity + coherence);
  r.quantum_violated = r.quantum_ratio > 1.0 + 3.0 * r.se_quantum_ratio;
  r.classical_violated = r.classical_ratio > 1.0 + 3.0 * r.se_classical_ratio;
  return r;
}

}  // namespace limitclock
