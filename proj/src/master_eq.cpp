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

#include "limitclock/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace limitclock {

void ModelParams::validate() const {
  if (n_atoms < 1) throw ConfigError("n_atoms", "must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be > 0");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("omega", "must be >= 0");
  if (!std::isfinite(phi)) throw ConfigError("phi", "must be finite");
  if (!(omega_a > 0.0)) throw ConfigError("omega_a", "must be > 0");
}

Matrix Superoperator::apply(const Matrix& rho) const {
  return unvectorize(data * vectorize(rho), dim);
}

Vector vectorize(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvectorize(const Vector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix spre(const Matrix& a) {
  const Eigen::Index d = a.rows();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (Eigen::Index c = 0; c < d; ++c) out.block(c * d, c * d, d, d) = a;
  return out;
}

Matrix spost(const Matrix& b) {
  const Eigen::Index d = b.rows();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      // (B^T kron I)
      if (b(c, r) != Complex(0.0)) out.block(r * d, c * d, d, d) = b(c, r) * Matrix::Identity(d, d);
    }
  }
  return out;
}

Superoperator build_liouvillian(const SpinOperatorSet& ops, const ModelParams& params) {
  params.validate();
  const Complex i(0.0, 1.0);
  const Matrix jpjm = ops.jp * ops.jm;
  Superoperator l;
  l.dim = ops.dim;
  l.data = -i * params.omega * (spre(ops.jx) - spost(ops.jx)) +
           params.gamma * (spre(ops.jm) * spost(ops.jp) - 0.5 * spre(jpjm) - 0.5 * spost(jpjm));
  return l;
}

Matrix apply_liouvillian(const SpinOperatorSet& ops, const ModelParams& params, const Matrix& rho) {
  const Complex i(0.0, 1.0);
  const Matrix jpjm = ops.jp * ops.jm;
  return -i * params.omega * (ops.jx * rho - rho * ops.jx) +
         params.gamma * (ops.jm * rho * ops.jp - 0.5 * (jpjm * rho + rho * jpjm));
}

LiouvillianSplit split_liouvillian(const SpinOperatorSet& ops, const ModelParams& params) {
  params.validate();
  const Complex i(0.0, 1.0);
  const Matrix jpjm = ops.jp * ops.jm;
  const Matrix jump = spre(ops.jm) * spost(ops.jp);
  LiouvillianSplit s;
  s.l1.dim = s.l2.dim = ops.dim;
  s.l1.data = -i * params.omega * spre(ops.jx) + 0.5 * params.gamma * (jump - spre(jpjm));
  s.l2.data = i * params.omega * spost(ops.jx) + 0.5 * params.gamma * (jump - spost(jpjm));
  return s;
}

namespace {

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("time grid is empty");
  if (t_grid.front() < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("time grid is not increasing");
  }
}

DensityMatrix to_state(const Vector& v, int dim) {
  Matrix m = unvectorize(v, dim);
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(m));
}

using RkState = std::vector<Complex>;

}  // namespace

std::vector<DensityMatrix> evolve_unconditional(const Superoperator& l, const DensityMatrix& rho0,
                                                std::span<const double> t_grid, Propagator method,
                                                double rk_tol) {
  check_grid(t_grid);
  if (rho0.dim() != l.dim) throw std::invalid_argument("evolve_unconditional: dimension mismatch");

  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  Vector v = vectorize(rho0.matrix());
  double t_prev = 0.0;

  if (method == Propagator::kExponential) {
    std::map<double, Matrix> cache;
    for (double t : t_grid) {
      const double step = t - t_prev;
      if (step > 0.0) {
        auto it = cache.find(step);
        if (it == cache.end()) it = cache.emplace(step, (l.data * step).exp()).first;
        v = it->second * v;
      }
      out.push_back(t == 0.0 ? rho0 : to_state(v, l.dim));
      t_prev = t;
    }
    return out;
  }

  namespace odeint = boost::numeric::odeint;
  RkState x(v.data(), v.data() + v.size());
  auto rhs = [&l](const RkState& s, RkState& ds, double) {
    Eigen::Map<const Vector> sv(s.data(), static_cast<Eigen::Index>(s.size()));
    Eigen::Map<Vector> dv(ds.data(), static_cast<Eigen::Index>(ds.size()));
    dv.noalias() = l.data * sv;
  };
  auto stepper = odeint::make_controlled(rk_tol, rk_tol, odeint::runge_kutta_dopri5<RkState>());
  for (double t : t_grid) {
    if (t > t_prev) {
      const double dt0 = std::min(1e-3, t - t_prev);
      odeint::integrate_adaptive(stepper, rhs, x, t_prev, t, dt0);
    }
    Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    out.push_back(t == 0.0 ? rho0 : to_state(xv, l.dim));
    t_prev = t;
  }
  return out;
}

namespace {

/// Bordered system [[L, v], [w^T, 0]] with w the trace functional and v the
/// vectorized maximally mixed state.
Matrix bordered_matrix(const Superoperator& l) {
  const int d = l.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Matrix b = Matrix::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = l.data;
  for (int k = 0; k < d; ++k) {
    const Eigen::Index idx = static_cast<Eigen::Index>(k) * d + k;
    b(idx, n) = 1.0 / d;
    b(n, idx) = 1.0;
  }
  return b;
}

}  // namespace

DensityMatrix steady_state_numeric(const Superoperator& l, double rcond_floor) {
  const Eigen::Index n = static_cast<Eigen::Index>(l.dim) * l.dim;
  Eigen::PartialPivLU<Matrix> lu(bordered_matrix(l));
  const double rc = lu.rcond();
  if (!(rc > rcond_floor)) {
    throw NumericError("steady_state_numeric: Liouvillian kernel is degenerate (rcond " +
                       std::to_string(rc) + ")");
  }
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  const Vector sol = lu.solve(rhs);
  Matrix rho = unvectorize(sol.head(n), l.dim);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

DensityMatrix steady_state_exact(const SpinOperatorSet& ops, const ModelParams& params) {
  params.validate();
  const int d = ops.dim;
  const int two_j = ops.n_atoms;
  const double log_ratio = std::log(params.omega / params.gamma);  // -inf when omega == 0

  // A|l> = sum_m c_m J-^m |l>, c_m = (-i Omega/gamma)^(2j-m). J-^m|l> is
  // prod_{s=0}^{m-1} sqrt(j(j+1) - m_s(m_s-1)) |l-m> with m_s = l - s - j.
  std::vector<double> log_mag(static_cast<std::size_t>(d) * d, -std::numeric_limits<double>::infinity());
  std::vector<Complex> phase(static_cast<std::size_t>(d) * d, Complex(0.0));
  auto at = [d](int r, int c) { return static_cast<std::size_t>(c) * d + r; };
  static const Complex kMinusIPowers[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
  double log_max = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < d; ++l) {
    double log_ladder = 0.0;
    for (int m = 0; m <= l; ++m) {
      if (m > 0) {
        const double ms = (l - (m - 1)) - ops.j;
        log_ladder += 0.5 * std::log(ops.j * (ops.j + 1.0) - ms * (ms - 1.0));
      }
      const int power = two_j - m;
      const double lc = power == 0 ? 0.0 : power * log_ratio;
      const double total = lc + log_ladder;
      if (total == -std::numeric_limits<double>::infinity()) continue;
      const int r = l - m;
      log_mag[at(r, l)] = total;
      phase[at(r, l)] = kMinusIPowers[power % 4];
      log_max = std::max(log_max, total);
    }
  }
  Matrix a = Matrix::Zero(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      const double lm = log_mag[at(r, c)];
      if (std::isfinite(lm)) a(r, c) = phase[at(r, c)] * std::exp(lm - log_max);
    }
  }
  Matrix rho = a * a.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const Matrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DrazinSolver::DrazinSolver(const Superoperator& l, const DensityMatrix& rho_ss, double rcond_floor)
    : l_(&l), rho_ss_vec_(vectorize(rho_ss.matrix())), lu_(bordered_matrix(l)) {
  const Eigen::Index n = static_cast<Eigen::Index>(l.dim) * l.dim;
  trace_row_ = Vector::Zero(n);
  for (int k = 0; k < l.dim; ++k) trace_row_(static_cast<Eigen::Index>(k) * l.dim + k) = 1.0;
  rcond_ = lu_.rcond();
  if (!(rcond_ > rcond_floor)) {
    throw NumericError("DrazinSolver: ill-conditioned Liouvillian (rcond estimate " +
                       std::to_string(rcond_) + ")");
  }
}

Vector DrazinSolver::apply_vec(const Vector& a) const {
  const Eigen::Index n = trace_row_.size();
  if (a.size() != n) throw std::invalid_argument("DrazinSolver::apply: dimension mismatch");
  const Complex tr = trace_row_.dot(a);  // dot conjugates the (real) first argument
  const Vector qa = a - rho_ss_vec_ * tr;
  Vector rhs(n + 1);
  rhs.head(n) = qa;
  rhs(n) = 0.0;
  const Vector sol = lu_.solve(rhs);
  Vector x = sol.head(n);
  last_residual_ = (l_->data * x - qa).norm();
  last_trace_ = std::abs(trace_row_.dot(x));
  const double scale = std::max(1.0, qa.norm());
  if (last_residual_ > 1e-9 * scale || last_trace_ > 1e-10 * scale) {
    throw NumericError("DrazinSolver: solve residual " + std::to_string(last_residual_) +
                       " (rcond estimate " + std::to_string(rcond_) + ")");
  }
  return x;
}

Matrix DrazinSolver::apply(const Matrix& a) const {
  return unvectorize(apply_vec(vectorize(a)), l_->dim);
}

Matrix drazin_apply(const Superoperator& l, const DensityMatrix& rho_ss, const Matrix& a) {
  return DrazinSolver(l, rho_ss).apply(a);
}

std::vector<SteadyStatePoint> steady_state_sweep(std::span<const int> n_atoms, double gamma,
                                                 std::span<const double> betas) {
  std::vector<SteadyStatePoint> rows;
  rows.reserve(n_atoms.size() * betas.size());
  for (int n : n_atoms) {
    const SpinOperatorSet ops = build_collective_ops(n);
    for (double beta : betas) {
      ModelParams p;
      p.n_atoms = n;
      p.gamma = gamma;
      p.omega = beta * p.omega0();
      const DensityMatrix rho = steady_state_exact(ops, p);
      rows.push_back({beta, n, expectation_real(rho, ops.jz) / n});
    }
  }
  return rows;
}

}  // namespace limitclock
