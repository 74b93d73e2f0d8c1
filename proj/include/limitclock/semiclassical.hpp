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

#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace limitclock {

/// Scaled first moments: x = <Jx>/N, y = <Jy>/N, z = <Jz>/N.
struct BlochPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double radius_squared() const { return x * x + y * y + z * z; }
};

struct SemiclassicalParams {
  double omega = 0.0;
  double gamma = 0.0;
  int n_atoms = 1;
  /// Keep the finite-N term (gamma/4)(1+2Z)^2 in dZ.
  bool include_correction = false;

  double omega0() const { return 0.5 * gamma * n_atoms; }
};

/// Raised when a limit-cycle quantity is requested with Omega < Omega0.
class BelowThreshold : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Factorized mean-field equations
///   dX = gN Z X
///   dY = -Omega Z + gN Y Z
///   dZ = Omega Y - gN (1/4 - Z^2) [- (g/4)(1 + 2Z)^2]
BlochPoint semiclassical_rhs(const BlochPoint& p, const SemiclassicalParams& params);

struct SemiclassicalTrajectory {
  std::vector<double> t;
  std::vector<BlochPoint> points;
};

/// Adaptive Dormand-Prince integration, reporting at each t_grid point.
SemiclassicalTrajectory integrate_semiclassical(const BlochPoint& p0, const SemiclassicalParams& params,
                                                std::span<const double> t_grid, double tol = 1e-12);

double hopf_threshold(double gamma, int n_atoms);

/// sqrt(Omega^2 - Omega0^2); throws BelowThreshold for Omega < Omega0.
double limit_cycle_frequency(double omega, double omega0);

struct StereoCoefficients {
  double a = 0.0;         // Omega0 / Omega
  double b = 0.0;         // sqrt(1 - a^2)
  double k_const = 0.0;   // time offset fixing theta(0) = pi/2
  std::complex<double> mu;  // b + i a
  double omega_lc = 0.0;
};
StereoCoefficients stereo_coefficients(double omega, double omega0);

/// Continuous solution of dtheta/dt = -Omega + Omega0 sin(theta),
///   theta(t) = 2 arctan[a - b tan(omega_lc (t - K)/2)],
/// unwrapped across the tan branch points. theta0 must lie in (-pi, pi).
double theta_solution(double t, double omega, double omega0, double theta0 = std::numbers::pi / 2);

/// Stereographic coordinate u(t) of the limit cycle, z = i u, with t = 0 the
/// passage through the ground state (u -> infinity):
///   u(t) = Im[(mu + conj(mu) e^{i w t}) / (1 - cos w t)] = a + b cot(w t / 2).
/// Throws std::domain_error at the poles t = 2 pi k / w.
double stereographic_limit_cycle(double t, double omega, double omega0);

/// Inverse stereographic projection of z = i u onto the scaled Bloch sphere.
BlochPoint bloch_from_stereographic(double u);

enum class OrbitKind { kFixedPoint, kPeriodic, kUndetermined };

struct OrbitSummary {
  OrbitKind kind = OrbitKind::kUndetermined;
  /// Mean Poincare return time (periodic orbits).
  double period = 0.0;
  /// Max relative deviation between successive return times.
  double period_spread = 0.0;
  std::size_t returns = 0;
  BlochPoint final_point;
  double final_speed = 0.0;
};

/// Integrates for t_transient + t_measure and classifies the attractor from
/// the Poincare section Z = 0 (Z decreasing) during the measurement window.
OrbitSummary classify_orbit(const BlochPoint& p0, const SemiclassicalParams& params, double t_transient,
                            double t_measure);

/// Downward crossings of Z = 0, located by cubic Hermite interpolation
/// between samples using the vector field for the slopes.
std::vector<double> poincare_crossings(const SemiclassicalTrajectory& traj, const SemiclassicalParams& params);

}  // namespace limitclock
