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

#include <cmath>
#include <numbers>
#include <random>

#include "limitclock/clock.hpp"
#include "limitclock/sme.hpp"
#include "oracles.hpp"

using namespace limitclock;
constexpr double kPi = std::numbers::pi;

namespace {

struct Series {
  std::vector<double> t, z;
};

Series cosine(double j, double w, double dt, double t_end, double noise = 0.0, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-noise, noise);
  Series s;
  for (double t = 0.0; t <= t_end; t += dt) {
    s.t.push_back(t);
    s.z.push_back(j * std::cos(w * t) + (noise > 0 ? u(rng) : 0.0));
  }
  return s;
}

}  // namespace

TEST_CASE("noiseless cosine gives a square wave") {
  const double j = 3.0, w = 2.0, dt = 1e-3;
  const auto s = cosine(j, w, dt, 30.0);
  ClockSignalConfig cfg{0.0, 0};
  const auto sig = clock_signal(s.z, j, cfg);
  CHECK(sig.front() == 1);
  const auto edges = detect_edges(s.z, s.t, j, cfg);
  REQUIRE(edges.falling.size() >= 9);
  for (std::size_t k = 0; k < edges.falling.size(); ++k) {
    CHECK(edges.falling[k] == doctest::Approx((kPi / 2 + 2 * kPi * k) / w).epsilon(1e-6));
  }
  const auto ex = extract_periods(s.z, s.t, j, cfg);
  for (double T : ex.periods) CHECK(T == doctest::Approx(kPi).epsilon(1e-6));

  // Hysteresis moves the falling edge to the -h*j crossing.
  ClockSignalConfig hcfg{0.25, 0};
  const auto he = detect_edges(s.z, s.t, j, hcfg);
  CHECK(he.falling.front() == doctest::Approx((kPi - std::acos(0.25)) / w).epsilon(1e-6));
}

TEST_CASE("constant signal") {
  const std::vector<double> z(100, 2.0), t = [] {
    std::vector<double> v(100);
    for (int k = 0; k < 100; ++k) v[k] = k;
    return v;
  }();
  ClockSignalConfig cfg;
  for (auto s : clock_signal(z, 3.0, cfg)) CHECK(s == 1);
  const auto ex = extract_periods(z, t, 3.0, cfg);
  CHECK(ex.periods.empty());
  CHECK(!ex.warning.empty());
}

TEST_CASE("hysteresis suppresses chatter") {
  const double j = 2.0, w = 3.0;
  const auto clean = cosine(j, w, 1e-3, 40.0);
  const auto noisy = cosine(j, w, 1e-3, 40.0, 0.2 * j, 9);
  ClockSignalConfig cfg{0.25, 0};
  const auto a = detect_edges(clean.z, clean.t, j, cfg);
  const auto b = detect_edges(noisy.z, noisy.t, j, cfg);
  CHECK(a.falling.size() == b.falling.size());
  CHECK(a.rising.size() == b.rising.size());
  ClockSignalConfig none{0.0, 0};
  CHECK(detect_edges(noisy.z, noisy.t, j, none).falling.size() > a.falling.size());
}

TEST_CASE("square wave periods resolve to one sample") {
  const double dt = 0.01, T0 = 1.37;
  std::vector<double> t, z;
  for (int k = 0; k < 3000; ++k) {
    t.push_back(k * dt);
    z.push_back(std::fmod(k * dt, T0) < T0 / 2 ? 1.0 : -1.0);
  }
  const auto ex = extract_periods(z, t, 1.0, {0.25, 2});
  REQUIRE(ex.periods.size() > 10);
  for (double T : ex.periods) CHECK(std::abs(T - T0) <= dt + 1e-12);
}

TEST_CASE("period statistics") {
  const std::vector<double> same(50, 1.3);
  const auto s = period_statistics(same);
  CHECK(s.var_t == 0.0);
  CHECK(std::isinf(s.n_prec));
  CHECK_THROWS(period_statistics(std::vector<double>{1.0}));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(1.0, 0.1);
  std::vector<double> p(5000);
  for (auto& v : p) v = g(rng);
  const auto st = period_statistics(p, 1000, 3);
  CHECK(st.mean_t == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(st.n_prec - 100.0) < 3 * st.se_nprec);
  CHECK(st.se_mean == doctest::Approx(0.1 / std::sqrt(5000.0)).epsilon(0.15));
  CHECK(st.n_samples == 5000);
  // Bootstrap is seeded.
  CHECK(period_statistics(p, 200, 3).se_nprec == period_statistics(p, 200, 3).se_nprec);
}

TEST_CASE("Spearman correlation") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> y{9.0, 7.5, 4.0, 3.9, 1.0};
  const auto r = spearman(x, y);
  CHECK(r.rho == doctest::Approx(-1.0));
  CHECK(r.p_value == doctest::Approx(2.0 / 120.0));

  const std::vector<double> x7{1, 2, 3, 4, 5, 6, 7}, y7{2, 1, 4, 3, 7, 5, 6};
  const auto ref = oracle::spearman_exact(x7, y7);
  CHECK(spearman(x7, y7).rho == doctest::Approx(ref.first));
  CHECK(spearman(x7, y7).p_value == doctest::Approx(ref.second));

  // Large-sample branch against full enumeration at n = 10.
  const std::vector<double> x10{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, y10{3, 1, 2, 6, 4, 5, 9, 10, 7, 8};
  const auto ref10 = oracle::spearman_exact(x10, y10);
  CHECK(spearman(x10, y10).rho == doctest::Approx(ref10.first));
  CHECK(std::abs(spearman(x10, y10).p_value - ref10.second) < 0.01);
}

TEST_CASE("conditioned clock in the large-j regime") {
  SmeConfig cfg;
  cfg.params.n_atoms = 24;
  cfg.params.omega = kPi;
  cfg.params.gamma = 1.0 / 12.0;
  const double T = 2 * kPi / std::sqrt(kPi * kPi - 1.0);
  cfg.t_final = 40 * T;
  const auto r = simulate_trajectory(cfg, 3);
  const auto ex = extract_periods(r.jz, r.t, 12.0, {});
  REQUIRE(ex.periods.size() > 20);
  const auto st = period_statistics(ex.periods, 0);
  CHECK(st.mean_t == doctest::Approx(T).epsilon(0.1));
  CHECK(st.var_t > 0.0);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS((ClockSignalConfig{0.5, 2}.validate()), ConfigError);
  CHECK_THROWS_AS((ClockSignalConfig{-0.1, 2}.validate()), ConfigError);
  CHECK_THROWS_AS((ClockSignalConfig{0.2, -1}.validate()), ConfigError);
}
