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

#include "limitclock/semiclassical.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace limitclock {

namespace {
constexpr double kPi = std::numbers::pi;
}

BlochPoint semiclassical_rhs(const BlochPoint& p, const SemiclassicalParams& params) {
  const double gn = params.gamma * params.n_atoms;
  BlochPoint d;
  d.x = gn * p.z * p.x;
  d.y = -params.omega * p.z + gn * p.y * p.z;
  d.z = params.omega * p.y - gn * (0.25 - p.z * p.z);
  if (params.include_correction) {
    const double s = 1.0 + 2.0 * p.z;
    d.z -= 0.25 * params.gamma * s * s;
  }
  return d;
}

SemiclassicalTrajectory integrate_semiclassical(const BlochPoint& p0, const SemiclassicalParams& params,
                                                std::span<const double> t_grid, double tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 3>;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("integrate_semiclassical: grid not increasing");
  }
  SemiclassicalTrajectory out;
  if (t_grid.empty()) return out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.points.reserve(t_grid.size());

  State x{p0.x, p0.y, p0.z};
  auto rhs = [&params](const State& s, State& ds, double) {
    const BlochPoint d = semiclassical_rhs({s[0], s[1], s[2]}, params);
    ds = {d.x, d.y, d.z};
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  double t_prev = t_grid.front();
  for (double t : t_grid) {
    if (t > t_prev) {
      const std::size_t steps = odeint::integrate_adaptive(stepper, rhs, x, t_prev, t, std::min(1e-3, t - t_prev));
      if (steps == 0) throw std::runtime_error("integrate_semiclassical: step failure");
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
      throw std::runtime_error("integrate_semiclassical: non-finite state at t=" + std::to_string(t));
    }
    out.points.push_back({x[0], x[1], x[2]});
    t_prev = t;
  }
  return out;
}

double hopf_threshold(double gamma, int n_atoms) { return 0.5 * gamma * n_atoms; }

double limit_cycle_frequency(double omega, double omega0) {
  if (omega < omega0) {
    throw BelowThreshold("no limit cycle: Omega=" + std::to_string(omega) + " < Omega0=" + std::to_string(omega0));
  }
  return std::sqrt(omega * omega - omega0 * omega0);
}

StereoCoefficients stereo_coefficients(double omega, double omega0) {
  if (!(omega > omega0)) throw BelowThreshold("stereo_coefficients require Omega > Omega0");
  StereoCoefficients c;
  c.a = omega0 / omega;
  c.b = std::sqrt(1.0 - c.a * c.a);
  c.omega_lc = limit_cycle_frequency(omega, omega0);
  c.k_const = 2.0 / (omega * c.b) * std::atan((1.0 - c.a) / c.b);
  c.mu = {c.b, c.a};
  return c;
}

double theta_solution(double t, double omega, double omega0, double theta0) {
  if (!(theta0 > -kPi && theta0 < kPi)) throw std::domain_error("theta_solution: theta0 must lie in (-pi, pi)");
  const StereoCoefficients c = stereo_coefficients(omega, omega0);
  const double k_const = 2.0 / c.omega_lc * std::atan((std::tan(0.5 * theta0) - c.a) / c.b);
  const double phase0 = -0.5 * c.omega_lc * k_const;
  const double phase = 0.5 * c.omega_lc * (t - k_const);
  // tan(theta/2) = (a cos p - b sin p) / cos p; the half angle is recovered
  // with atan2 and pinned to the branch nearest a reference that advances
  // by -pi per half period.
  const double half = std::atan2(c.a * std::cos(phase) - c.b * std::sin(phase), std::cos(phase));
  const double reference = 0.5 * theta0 - (phase - phase0);
  const double shift = std::round((reference - half) / (2.0 * kPi));
  return 2.0 * (half + 2.0 * kPi * shift);
}

double stereographic_limit_cycle(double t, double omega, double omega0) {
  const StereoCoefficients c = stereo_coefficients(omega, omega0);
  const double arg = c.omega_lc * t;
  const double denom = 1.0 - std::cos(arg);
  if (std::abs(denom) < 1e-12) {
    const double period = 2.0 * kPi / c.omega_lc;
    const double nearest = std::round(t / period) * period;
    throw std::domain_error("stereographic_limit_cycle: pole at t=" + std::to_string(nearest) +
                            " (ground-state passage); nearest valid t is " +
                            std::to_string(nearest + 1e-6 * period));
  }
  const std::complex<double> num = c.mu + std::conj(c.mu) * std::polar(1.0, arg);
  return num.imag() / denom;
}

BlochPoint bloch_from_stereographic(double u) {
  const double s = 1.0 + u * u;
  return {0.0, u / s, 0.5 * (1.0 - u * u) / s};
}

std::vector<double> poincare_crossings(const SemiclassicalTrajectory& traj, const SemiclassicalParams& params) {
  std::vector<double> out;
  for (std::size_t k = 1; k < traj.t.size(); ++k) {
    const double z0 = traj.points[k - 1].z;
    const double z1 = traj.points[k].z;
    if (!(z0 > 0.0 && z1 <= 0.0)) continue;
    const double h = traj.t[k] - traj.t[k - 1];
    const double m0 = semiclassical_rhs(traj.points[k - 1], params).z * h;
    const double m1 = semiclassical_rhs(traj.points[k], params).z * h;
    auto hermite = [&](double s) {
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * z0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * z1 + (s3 - s2) * m1;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (hermite(mid) > 0.0 ? lo : hi) = mid;
    }
    out.push_back(traj.t[k - 1] + 0.5 * (lo + hi) * h);
  }
  return out;
}

OrbitSummary classify_orbit(const BlochPoint& p0, const SemiclassicalParams& params, double t_transient,
                            double t_measure) {
  // Sample finely enough that Hermite interpolation of the crossing is
  // accurate to well below 1e-6 of a period.
  const double omega_scale = params.omega + params.gamma * params.n_atoms;
  const double h = std::min(0.01 / std::max(omega_scale, 1e-12), (t_transient + t_measure) / 1000.0);
  std::vector<double> grid;
  for (double t = 0.0; t <= t_transient + t_measure; t += h) grid.push_back(t);
  const SemiclassicalTrajectory traj = integrate_semiclassical(p0, params, grid);

  OrbitSummary s;
  s.final_point = traj.points.back();
  const BlochPoint d = semiclassical_rhs(s.final_point, params);
  s.final_speed = std::sqrt(d.radius_squared());

  std::vector<double> crossings;
  for (double tc : poincare_crossings(traj, params)) {
    if (tc >= t_transient) crossings.push_back(tc);
  }
  s.returns = crossings.size();
  if (crossings.size() >= 3) {
    double sum = 0.0;
    for (std::size_t k = 1; k < crossings.size(); ++k) sum += crossings[k] - crossings[k - 1];
    s.period = sum / static_cast<double>(crossings.size() - 1);
    for (std::size_t k = 1; k < crossings.size(); ++k) {
      s.period_spread = std::max(s.period_spread, std::abs(crossings[k] - crossings[k - 1] - s.period) / s.period);
    }
    if (s.period_spread < 1e-4) s.kind = OrbitKind::kPeriodic;
  } else if (s.returns == 0 && s.final_speed < 1e-8) {
    s.kind = OrbitKind::kFixedPoint;
  }
  return s;
}

}  // namespace limitclock
