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

#include "limitclock/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace limitclock {

namespace {

template <class State>
PowerBalance balance(const State& s, const SpinOperatorSet& ops, const ModelParams& params) {
  PowerBalance pb;
  pb.p_in = params.omega_a * params.omega * expectation_real(s, ops.jy);
  pb.p_out = params.omega_a * params.gamma * expectation_real(s, ops.jp * ops.jm);
  pb.de_dt = pb.p_in - pb.p_out;
  return pb;
}

}  // namespace

PowerBalance power_balance(const DensityMatrix& state, const SpinOperatorSet& ops, const ModelParams& params) {
  return balance(state, ops, params);
}

PowerBalance power_balance(const PureState& state, const SpinOperatorSet& ops, const ModelParams& params) {
  return balance(state, ops, params);
}

double jz_rate(const DensityMatrix& state, const SpinOperatorSet& ops, const ModelParams& params) {
  const Matrix lrho = apply_liouvillian(ops, params, state.matrix());
  return params.omega_a * (ops.jz * lrho).trace().real();
}

EnergyLedger dissipated_energy(const TrajectoryRecord& traj, const ModelParams& params) {
  if (traj.jpjm.size() != traj.t.size() || traj.jy.size() != traj.t.size()) {
    throw std::invalid_argument("dissipated_energy: trajectory lacks <J+J->_c or <Jy>_c samples");
  }
  EnergyLedger led;
  led.t = traj.t;
  const std::size_t n = traj.t.size();
  led.p_in.resize(n);
  led.p_out.resize(n);
  led.e_dis.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    led.p_in[k] = params.omega_a * params.omega * traj.jy[k];
    // <J+J-> >= 0 exactly; clip rounding noise so e_dis stays monotone.
    led.p_out[k] = params.omega_a * params.gamma * std::max(0.0, traj.jpjm[k]);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) acc += 0.5 * (led.p_out[k] + led.p_out[k - 1]) * (led.t[k] - led.t[k - 1]);
    led.e_dis[k] = acc;
  }
  return led;
}

double ledger_energy_at(const EnergyLedger& ledger, double t) {
  if (ledger.t.empty()) throw std::invalid_argument("ledger_energy_at: empty ledger");
  if (t <= ledger.t.front()) return ledger.e_dis.front();
  if (t >= ledger.t.back()) return ledger.e_dis.back();
  const auto it = std::upper_bound(ledger.t.begin(), ledger.t.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - ledger.t.begin());
  const double f = (t - ledger.t[k - 1]) / (ledger.t[k] - ledger.t[k - 1]);
  return ledger.e_dis[k - 1] + f * (ledger.e_dis[k] - ledger.e_dis[k - 1]);
}

CyclePairs cycle_pairs(const EnergyLedger& ledger, std::span<const double> edge_times) {
  CyclePairs out;
  for (std::size_t k = 1; k < edge_times.size(); ++k) {
    out.periods.push_back(edge_times[k] - edge_times[k - 1]);
    out.delta_e.push_back(ledger_energy_at(ledger, edge_times[k]) - ledger_energy_at(ledger, edge_times[k - 1]));
  }
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: x has zero variance");
  LinearFit f;
  f.n = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return f;
}

CycleDissipation cycle_dissipation(CyclePairs pairs, std::size_t min_cycles) {
  if (pairs.periods.size() < min_cycles) {
    throw std::invalid_argument("cycle_dissipation: " + std::to_string(pairs.periods.size()) +
                                " cycles, need at least " + std::to_string(min_cycles));
  }
  CycleDissipation out;
  out.fit = least_squares(pairs.periods, pairs.delta_e);
  out.pairs = std::move(pairs);
  return out;
}

}  // namespace limitclock
