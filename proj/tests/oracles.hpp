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

// Reference implementations used only by the tests. None of these share code
// with the library: they are written from first principles and favour clarity
// over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Dicke lowering operator from J-|j,m> = sqrt((j+m)(j-m+1)) |j,m-1>,
/// basis index k <-> m = k - j.
inline Mat lowering(int n) {
  const double j = 0.5 * n;
  Mat jm = Mat::Zero(n + 1, n + 1);
  for (int k = 1; k <= n; ++k) {
    const double m = k - j;
    jm(k - 1, k) = std::sqrt((j + m) * (j - m + 1.0));
  }
  return jm;
}

struct Spin {
  Mat jx, jy, jz, jp, jm;
};

inline Spin spin(int n) {
  Spin s;
  s.jm = lowering(n);
  s.jp = s.jm.adjoint();
  s.jx = 0.5 * (s.jp + s.jm);
  s.jy = cd(0, -0.5) * (s.jp - s.jm);
  s.jz = Mat::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) s.jz(k, k) = k - 0.5 * n;
  return s;
}

/// Collective operators on the full 2^n product space.
inline Spin tensor_spin(int n) {
  const int d = 1 << n;
  Spin s;
  s.jz = Mat::Zero(d, d);
  s.jm = Mat::Zero(d, d);
  for (int state = 0; state < d; ++state) {
    for (int q = 0; q < n; ++q) {
      const bool up = (state >> q) & 1;
      s.jz(state, state) += up ? 0.5 : -0.5;
      if (up) s.jm(state & ~(1 << q), state) += 1.0;
    }
  }
  s.jp = s.jm.adjoint();
  s.jx = 0.5 * (s.jp + s.jm);
  s.jy = cd(0, -0.5) * (s.jp - s.jm);
  return s;
}

/// d rho/dt = -i Omega [Jx, rho] + gamma (J- rho J+ - 1/2 {J+J-, rho}).
inline Mat lindblad(const Spin& s, double omega, double gamma, const Mat& rho) {
  const Mat h = omega * s.jx;
  const Mat n = s.jp * s.jm;
  return cd(0, -1) * (h * rho - rho * h) + gamma * (s.jm * rho * s.jp - 0.5 * (n * rho + rho * n));
}

/// Superoperator assembled column by column from an arbitrary linear map,
/// with row-major flattening of both input and output (independent of any
/// column-major convention elsewhere).
inline Mat superop(int d, const std::function<Mat(const Mat&)>& f) {
  Mat out(d * d, d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Mat e = Mat::Zero(d, d);
      e(a, b) = 1.0;
      const Mat img = f(e);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) out(r * d + c, a * d + b) = img(r, c);
      }
    }
  }
  return out;
}

inline Mat unflatten(const Eigen::VectorXcd& v, int d) {
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = v(r * d + c);
  }
  return m;
}

inline Eigen::VectorXcd flatten(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXcd v(d * d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) v(r * d + c) = m(r, c);
  }
  return v;
}

/// Steady state as the eigenvector of the superoperator whose eigenvalue has
/// the smallest modulus.
inline Mat steady_state_eig(const Spin& s, double omega, double gamma) {
  const int d = static_cast<int>(s.jz.rows());
  const Mat l = superop(d, [&](const Mat& r) { return lindblad(s, omega, gamma, r); });
  Eigen::ComplexEigenSolver<Mat> es(l);
  Eigen::Index best = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&best);
  Mat rho = unflatten(es.eigenvectors().col(best), d);
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

/// Drazin inverse through the spectral decomposition: 1/lambda on every
/// eigenvalue away from zero, 0 on the kernel.
inline Mat drazin_spectral(const Mat& l, double zero_tol = 1e-9) {
  Eigen::ComplexEigenSolver<Mat> es(l);
  const Mat& v = es.eigenvectors();
  Eigen::VectorXcd inv(l.rows());
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    const cd lam = es.eigenvalues()(k);
    inv(k) = std::abs(lam) > zero_tol ? 1.0 / lam : cd(0.0);
  }
  return v * inv.asDiagonal() * v.inverse();
}

/// Coherence term -4 Tr[L1 LD L2 rho] - 4 Tr[L2 LD L1 rho] with
/// L1 rho = -i Omega Jx rho + gamma/2 (J- rho J+ - J+J- rho),
/// L2 rho = +i Omega rho Jx + gamma/2 (J- rho J+ - rho J+J-).
inline double coherence_spectral(int n, double omega, double gamma) {
  const Spin s = spin(n);
  const int d = n + 1;
  const Mat nn = s.jp * s.jm;
  auto l1 = [&](const Mat& r) -> Mat {
    return cd(0, -omega) * s.jx * r + 0.5 * gamma * (s.jm * r * s.jp - nn * r);
  };
  auto l2 = [&](const Mat& r) -> Mat {
    return cd(0, omega) * r * s.jx + 0.5 * gamma * (s.jm * r * s.jp - r * nn);
  };
  const Mat l = superop(d, [&](const Mat& r) { return lindblad(s, omega, gamma, r); });
  const Mat ld = drazin_spectral(l);
  const Mat rho = steady_state_eig(s, omega, gamma);
  const Mat a = l1(unflatten(ld * flatten(l2(rho)), d));
  const Mat b = l2(unflatten(ld * flatten(l1(rho)), d));
  return (-4.0 * (a.trace() + b.trace())).real();
}

/// Closed forms for the activity and coherence terms at N = 2 and N = 3.
struct Kinetic {
  double activity;
  double coherence;
};

inline Kinetic closed_form(int n, double w, double g) {
  const double w2 = w * w, w4 = w2 * w2, w6 = w4 * w2, w8 = w4 * w4, w10 = w8 * w2;
  const double g2 = g * g, g3 = g2 * g, g4 = g2 * g2, g5 = g4 * g, g6 = g4 * g2, g7 = g6 * g, g9 = g7 * g2,
               g11 = g9 * g2;
  if (n == 2) {
    return {4 * g * w2 * (g2 + w2) / (4 * g4 + 4 * g2 * w2 + 3 * w4),
            32 * (3 * g2 * w6 + w8) / (16 * g7 + 20 * g5 * w2 + 16 * g3 * w4 + 3 * g * w6)};
  }
  return {g * w2 * (18 * g4 + 12 * g2 * w2 + 5 * w4) / (18 * g6 + 12 * g4 * w2 + 5 * g2 * w4 + 2 * w6),
          8 * w8 * (1323 * g4 + 468 * g2 * w2 + 80 * w4) /
              (7938 * g11 + 7668 * g9 * w2 + 4077 * g7 * w4 + 1734 * g5 * w6 + 344 * g3 * w8 + 32 * g * w10)};
}

/// Classical fourth-order Runge-Kutta with a fixed step.
template <class State, class Rhs>
State rk4(State y, double t0, double t1, int steps, Rhs f) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const State k1 = f(t, y);
    const State k2 = f(t + h / 2, y + (h / 2) * k1);
    const State k3 = f(t + h / 2, y + (h / 2) * k2);
    const State k4 = f(t + h, y + h * k3);
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

/// Mean-field Bloch equations on the sphere of radius 1/2.
inline Eigen::Vector3d bloch_rhs(const Eigen::Vector3d& r, double omega, double gamma, int n) {
  const double gn = gamma * n;
  return {gn * r.z() * r.x(), -omega * r.z() + gn * r.y() * r.z(), omega * r.y() - gn * (0.25 - r.z() * r.z())};
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t k = i;
    while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]]) ++k;
    for (std::size_t q = i; q <= k; ++q) r[idx[q]] = 0.5 * (i + k) + 1.0;
    i = k + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Ordinary least-squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Spearman rho and its two-sided permutation p-value by full enumeration.
inline std::pair<double, double> spearman_exact(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double rho = pearson(rx, ry);
  std::vector<double> perm = ry;
  std::sort(perm.begin(), perm.end());
  std::size_t hits = 0, total = 0;
  do {
    ++total;
    if (std::abs(pearson(rx, perm)) >= std::abs(rho) - 1e-12) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {rho, static_cast<double>(hits) / static_cast<double>(total)};
}

inline double trace_norm_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle
