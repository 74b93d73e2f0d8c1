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

#include <random>

#include "limitclock/kur.hpp"
#include "oracles.hpp"

using namespace limitclock;

namespace {

ModelParams params(int n, double omega, double gamma) {
  ModelParams p;
  p.n_atoms = n;
  p.omega = omega;
  p.gamma = gamma;
  return p;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_CASE("spot values at gamma = Omega = 1") {
  const auto n2 = numeric_nq(params(2, 1.0, 1.0));
  CHECK(rel(n2.activity, 8.0 / 11.0) < 1e-10);
  CHECK(rel(n2.coherence, 128.0 / 55.0) < 1e-10);
  const auto n3 = numeric_nq(params(3, 1.0, 1.0));
  CHECK(rel(n3.activity, 35.0 / 37.0) < 1e-10);
  CHECK(rel(n3.coherence, 14968.0 / 21793.0) < 1e-10);

  const auto a2 = analytic_nq(2, 1.0, 1.0);
  CHECK(rel(a2.activity, 8.0 / 11.0) < 1e-14);
  CHECK(rel(a2.coherence, 128.0 / 55.0) < 1e-14);
  const auto a3 = analytic_nq(3, 1.0, 1.0);
  CHECK(rel(a3.activity, 35.0 / 37.0) < 1e-14);
  CHECK(rel(a3.coherence, 14968.0 / 21793.0) < 1e-14);
  CHECK_THROWS(analytic_nq(4, 1.0, 1.0));
}

TEST_CASE("numerical terms against the closed forms on a grid") {
  for (int n : {2, 3}) {
    for (double g : {0.2, 1.0, 5.0}) {
      for (double w : {0.1, 1.0, 10.0}) {
        const auto num = numeric_nq(params(n, w, g));
        const auto ref = oracle::closed_form(n, w, g);
        CHECK(rel(num.activity, ref.activity) < 1e-8);
        CHECK(rel(num.coherence, ref.coherence) < 1e-8);
      }
    }
  }
}

TEST_CASE("coherence term against the spectral Drazin oracle") {
  for (int n : {1, 4, 6}) {
    for (double w : {0.7, 2.0}) {
      const auto num = numeric_nq(params(n, w, 0.8));
      CHECK(rel(num.coherence, oracle::coherence_spectral(n, w, 0.8)) < 1e-7);
    }
  }
}

TEST_CASE("limits") {
  const auto zero = numeric_nq(params(3, 0.0, 1.0));
  CHECK(std::abs(zero.activity) < 1e-12);
  CHECK(std::abs(zero.coherence) < 1e-12);

  // Strong drive at N = 2: activity tends to 4 gamma / 3.
  const double g = 0.7;
  CHECK(numeric_nq(params(2, 300.0, g)).activity == doctest::Approx(4 * g / 3).epsilon(1e-4));

  const std::vector<double> grid{1e-3, 0.01, 1.0, 50.0};
  const auto ratio = activity_ratio_curve(2, 1.0, grid);
  CHECK(ratio[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ratio[1] > ratio[2]);
  const double w = 50.0;
  CHECK(ratio[3] == doctest::Approx((4.0 / 3) / (4.0 / 3 + 32 * w * w / 3)).epsilon(1e-3));

  // Same trend for other N with gamma = 1.
  for (int n : {1, 3, 10}) {
    const auto r = activity_ratio_curve(n, 1.0, std::vector<double>{0.2, 0.5, 2.0, 8.0});
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] <= r[k - 1]);
    CHECK(r.back() < 0.5 * r.front());
  }
  CHECK_THROWS_AS(numeric_nq(params(kMaxKurAtoms + 1, 1.0, 1.0)), ConfigError);
}

TEST_CASE("ratio arithmetic") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(2.0, 0.2);
  std::vector<double> p(2000);
  for (auto& v : p) v = g(rng);
  const auto st = period_statistics(p, 300, 1);
  // Choose N + Q so that N_prec = 0.5 E[T] (N + Q).
  const double total = st.n_prec / (0.5 * st.mean_t);
  const auto rep = kur_test(st, 0.25 * total, 0.75 * total);
  CHECK(rep.quantum_ratio == doctest::Approx(0.5));
  CHECK(rep.classical_ratio == doctest::Approx(2.0));
  CHECK(rep.qfi == doctest::Approx(st.mean_t * total));
  CHECK(!rep.quantum_violated);
  CHECK(rep.classical_violated);
  CHECK(rep.se_quantum_ratio > 0.0);
  CHECK(rep.se_classical_ratio == doctest::Approx(4 * rep.se_quantum_ratio));

  ClockStatistics flat;
  flat.mean_t = 1.0;
  CHECK_THROWS(kur_test(flat, 1.0, 1.0));
}
