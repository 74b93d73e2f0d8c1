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

#include "limitclock/sme.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "limitclock/parallel.hpp"
#include "limitclock/rng.hpp"

namespace limitclock {

double default_time_step(const ModelParams& params) {
  const double j = params.j();
  const double stiffness = params.omega * j + params.gamma * j * (j + 1.0);
  double dt = 0.03 / stiffness;
  if (params.omega > params.omega0()) {
    const double w = std::sqrt(params.omega * params.omega - params.omega0() * params.omega0());
    dt = std::min(dt, 5e-4 * 2.0 * std::numbers::pi / w);
  }
  return dt;
}

double SmeConfig::resolved_dt() const { return dt > 0.0 ? dt : default_time_step(params); }

void SmeConfig::validate() const {
  params.validate();
  if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("dt", "must be > 0 (or 0 for the default)");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final", "must be > 0");
  if (record_stride < 1) throw ConfigError("record_stride", "must be >= 1");
  if (initial_state && initial_state->size() != params.n_atoms + 1) {
    throw ConfigError("initial_state", "dimension must be n_atoms + 1");
  }
}

std::vector<std::string> SmeConfig::warnings() const {
  std::vector<std::string> out;
  if (params.omega > params.omega0()) {
    const double w = std::sqrt(params.omega * params.omega - params.omega0() * params.omega0());
    const double period = 2.0 * std::numbers::pi / w;
    if (resolved_dt() > period / 200.0) {
      out.push_back("dt=" + std::to_string(resolved_dt()) + " exceeds 1/200 of the limit-cycle period " +
                    std::to_string(period));
    }
  }
  return out;
}

SmeModel::SmeModel(const ModelParams& params) : params_(params), ops_(build_collective_ops(params.n_atoms)) {
  params_.validate();
  const Complex phase = std::polar(1.0, params.phi);
  c_ = std::sqrt(params.gamma) * phase * ops_.jm;
  jpjm_ = ops_.jp * ops_.jm;
  h_eff_ = Complex(0.0, -params.omega) * ops_.jx - 0.5 * c_.adjoint() * c_;
  casimir_ = ops_.jx * ops_.jx + ops_.jy * ops_.jy + ops_.jz * ops_.jz;
  quadrature_ = phase * ops_.jm + std::conj(phase) * ops_.jp;
}

namespace {

/// In-place Milstein update of the nonlinear SSE
/// d psi = a dt + b dW with b = (c - x/2) psi and x = <c + c^dagger>.
/// Returns the quadrature mean <J- e^{i phi} + J+ e^{-i phi}> of the
/// pre-step state.
double sse_update(Vector& psi, Vector& work, double dw, const SmeModel& model, double dt) {
  const Matrix& c = model.c();
  work.noalias() = c * psi;
  const double x = 2.0 * psi.dot(work).real();  // <c + c^dagger>
  Vector drift = model.h_eff() * psi;
  drift += (0.5 * x) * work - (0.125 * x * x) * psi;
  const Vector b = work - (0.5 * x) * psi;
  // Directional derivative of b along itself.
  const Vector cb = c * b;
  const double dx = 2.0 * (psi.dot(cb) + b.dot(work)).real();
  const Vector bb = cb - (0.5 * x) * b - (0.5 * dx) * psi;
  psi += dt * drift + dw * b + (0.5 * (dw * dw - dt)) * bb;
  const double norm = psi.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm)) throw NumericError("sse_step: state norm collapsed");
  psi /= norm;
  return x / std::sqrt(model.params().gamma);
}

/// Positivity-preserving first-order map rho -> M rho M^dagger / Tr with
/// M = 1 + H_eff dt + c dy + (dy^2 - dt) c^2 / 2 and dy = <c + c^dagger> dt + dW.
/// To first order in dt it reproduces the Euler-Maruyama increment of the
/// homodyne SME, but it never produces negative eigenvalues.
Matrix sme_update(const Matrix& rho, double dw, const SmeModel& model, double dt, double* quad_mean) {
  const ModelParams& p = model.params();
  const Matrix& c = model.c();
  const double x = 2.0 * (c * rho).trace().real();
  if (quad_mean) *quad_mean = x / std::sqrt(p.gamma);
  const double dy = x * dt + dw;
  const Eigen::Index d = rho.rows();
  Matrix m = Matrix::Identity(d, d) + dt * model.h_eff() + dy * c + (0.5 * (dy * dy - dt)) * (c * c);
  Matrix out = m * rho * m.adjoint();
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  Eigen::SelfAdjointEigenSolver<Matrix> es(out, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-6) {
    throw NumericError("sme_step: eigenvalue " + std::to_string(lmin) + " after update; reduce dt");
  }
  return out;
}

/// Draws increments either from a CounterRng or from a caller-supplied span.
class IncrementSource {
 public:
  IncrementSource(std::uint64_t seed, double dt) : rng_(seed), normal_(0.0, std::sqrt(dt)) {}
  explicit IncrementSource(std::span<const double> fixed) : rng_(0), fixed_(fixed), use_fixed_(true) {}

  double next(std::size_t step) { return use_fixed_ ? fixed_[step] : normal_(rng_); }

 private:
  CounterRng rng_;
  std::normal_distribution<double> normal_;
  std::span<const double> fixed_;
  bool use_fixed_ = false;
};

template <class State>
void record_sample(TrajectoryRecord& rec, const SmeModel& model, const State& s, double t, double current,
                   double dw, double purity) {
  const SpinOperatorSet& ops = model.ops();
  rec.t.push_back(t);
  rec.jx.push_back(expectation(s, ops.jx).real());
  rec.jy.push_back(expectation(s, ops.jy).real());
  rec.jz.push_back(expectation(s, ops.jz).real());
  rec.jpjm.push_back(expectation(s, model.jpjm()).real());
  rec.casimir.push_back(expectation(s, model.casimir()).real());
  rec.current.push_back(current);
  rec.dw.push_back(dw);
  rec.purity.push_back(purity);
}

Vector initial_vector(const SmeConfig& config) {
  if (config.initial_state) return PureState(*config.initial_state).amplitudes();
  return PureState::ground(config.params.n_atoms + 1).amplitudes();
}

TrajectoryRecord run(const SmeConfig& config, IncrementSource& noise, std::size_t n_steps, std::uint64_t seed) {
  config.validate();
  const SmeModel model(config.params);
  const double dt = config.resolved_dt();
  const double gamma = config.params.gamma;
  const auto stride = static_cast<std::size_t>(config.record_stride);

  TrajectoryRecord rec;
  rec.seed = seed;
  const std::size_t n_records = n_steps / stride + 1;
  for (auto* v : {&rec.t, &rec.jx, &rec.jy, &rec.jz, &rec.jpjm, &rec.casimir, &rec.current, &rec.dw, &rec.purity}) {
    v->reserve(n_records);
  }

  double current_sum = 0.0;
  double dw_sum = 0.0;
  if (config.engine == Engine::kPureState) {
    PureState psi0(initial_vector(config));
    Vector psi = psi0.amplitudes();
    Vector work(psi.size());
    record_sample(rec, model, psi0, 0.0, gamma * expectation(psi0, model.quadrature()).real(), 0.0, 1.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double dw = noise.next(k);
      const double q = sse_update(psi, work, dw, model, dt);
      current_sum += homodyne_current_sample(q, dw, dt, gamma);
      dw_sum += dw;
      if ((k + 1) % stride == 0) {
        const PureState view(psi);
        const double n2 = psi.squaredNorm();
        record_sample(rec, model, view, static_cast<double>(k + 1) * dt, current_sum / stride, dw_sum, n2 * n2);
        current_sum = dw_sum = 0.0;
      }
    }
  } else {
    Matrix rho = PureState(initial_vector(config)).to_density().matrix();
    {
      const DensityMatrix view(rho);
      record_sample(rec, model, view, 0.0, gamma * expectation(view, model.quadrature()).real(), 0.0, view.purity());
    }
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double dw = noise.next(k);
      double q = 0.0;
      rho = sme_update(rho, dw, model, dt, &q);
      current_sum += homodyne_current_sample(q, dw, dt, gamma);
      dw_sum += dw;
      if ((k + 1) % stride == 0) {
        const DensityMatrix view(rho);
        record_sample(rec, model, view, static_cast<double>(k + 1) * dt, current_sum / stride, dw_sum,
                      view.purity());
        current_sum = dw_sum = 0.0;
      }
    }
  }
  return rec;
}

}  // namespace

DensityMatrix sme_step(const DensityMatrix& rho, double dw, const SmeModel& model, double dt) {
  return DensityMatrix(sme_update(rho.matrix(), dw, model, dt, nullptr));
}

PureState sse_step(const PureState& psi, double dw, const SmeModel& model, double dt) {
  if (std::abs(psi.amplitudes().norm() - 1.0) > 1e-12) throw std::invalid_argument("sse_step: state not normalized");
  Vector v = psi.amplitudes();
  Vector work(v.size());
  sse_update(v, work, dw, model, dt);
  return PureState(std::move(v));
}

double homodyne_current_sample(double quadrature_mean, double dw, double dt, double gamma) {
  return gamma * quadrature_mean + std::sqrt(gamma) * dw / dt;
}

TrajectoryRecord simulate_trajectory(const SmeConfig& config, std::uint64_t seed) {
  const double dt = config.resolved_dt();
  const auto n_steps = static_cast<std::size_t>(std::llround(config.t_final / dt));
  IncrementSource noise(seed, dt);
  return run(config, noise, n_steps, seed);
}

TrajectoryRecord simulate_with_increments(const SmeConfig& config, std::span<const double> increments) {
  IncrementSource noise(increments);
  return run(config, noise, increments.size(), 0);
}

EnsembleMoments ensemble_mean(const SmeConfig& config, int n_traj, std::uint64_t master_seed, unsigned threads) {
  if (n_traj < 2) throw ConfigError("n_traj", "ensemble needs at least 2 trajectories");
  config.validate();
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(n_traj));
  parallel_for(records.size(), threads, [&](std::size_t i) {
    TrajectoryRecord r = simulate_trajectory(config, substream_key(master_seed, i));
    // Only the first moments are reduced.
    r.jpjm.clear();
    r.casimir.clear();
    r.current.clear();
    r.dw.clear();
    r.purity.clear();
    records[i] = std::move(r);
  });

  EnsembleMoments out;
  out.n_traj = n_traj;
  out.master_seed = master_seed;
  out.t = records.front().t;
  const std::size_t m = out.t.size();
  auto reduce = [&](auto member, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(m, 0.0);
    se.assign(m, 0.0);
    for (const auto& r : records) {
      const auto& v = r.*member;
      for (std::size_t k = 0; k < m; ++k) mean[k] += v[k];
    }
    for (auto& v : mean) v /= n_traj;
    for (const auto& r : records) {
      const auto& v = r.*member;
      for (std::size_t k = 0; k < m; ++k) se[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
    }
    for (auto& v : se) v = std::sqrt(v / (n_traj - 1) / n_traj);
  };
  reduce(&TrajectoryRecord::jx, out.mean_jx, out.se_jx);
  reduce(&TrajectoryRecord::jy, out.mean_jy, out.se_jy);
  reduce(&TrajectoryRecord::jz, out.mean_jz, out.se_jz);
  return out;
}

}  // namespace limitclock
