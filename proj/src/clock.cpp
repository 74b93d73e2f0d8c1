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

#include "limitclock/clock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "limitclock/rng.hpp"
#include "limitclock/types.hpp"

namespace limitclock {

void ClockSignalConfig::validate() const {
  if (!(hysteresis >= 0.0 && hysteresis < 0.5)) throw ConfigError("hysteresis", "must lie in [0, 0.5)");
  if (discard_transient < 0) throw ConfigError("discard_transient", "must be >= 0");
}

namespace {

/// Calls on_edge(k, falling) for every level change at sample k.
template <class Fn>
std::vector<std::uint8_t> binarize(std::span<const double> jz, double j, const ClockSignalConfig& config,
                                   Fn&& on_edge) {
  config.validate();
  std::vector<std::uint8_t> s(jz.size());
  if (jz.empty()) return s;
  const double level = config.hysteresis * j;
  std::uint8_t state = jz[0] > 0.0 ? 1 : 0;
  s[0] = state;
  for (std::size_t k = 1; k < jz.size(); ++k) {
    if (state == 1 && jz[k] < -level) {
      state = 0;
      on_edge(k, true);
    } else if (state == 0 && jz[k] > level) {
      state = 1;
      on_edge(k, false);
    }
    s[k] = state;
  }
  return s;
}

}  // namespace

std::vector<std::uint8_t> clock_signal(std::span<const double> jz, double j, const ClockSignalConfig& config) {
  return binarize(jz, j, config, [](std::size_t, bool) {});
}

ClockEdges detect_edges(std::span<const double> jz, std::span<const double> t, double j,
                        const ClockSignalConfig& config) {
  if (jz.size() != t.size()) throw std::invalid_argument("detect_edges: series and time grid differ in length");
  ClockEdges edges;
  const double level = config.hysteresis * j;
  binarize(jz, j, config, [&](std::size_t k, bool falling) {
    const double thr = falling ? -level : level;
    const double z0 = jz[k - 1], z1 = jz[k];
    const double f = z1 == z0 ? 1.0 : std::clamp((thr - z0) / (z1 - z0), 0.0, 1.0);
    const double te = t[k - 1] + f * (t[k] - t[k - 1]);
    (falling ? edges.falling : edges.rising).push_back(te);
  });
  return edges;
}

PeriodExtraction extract_periods(std::span<const double> jz, std::span<const double> t, double j,
                                 const ClockSignalConfig& config) {
  const ClockEdges edges = detect_edges(jz, t, j, config);
  PeriodExtraction out;
  const auto discard = static_cast<std::size_t>(config.discard_transient);
  if (edges.falling.size() < discard + 2) {
    out.warning = "only " + std::to_string(edges.falling.size()) + " falling edges; need " +
                  std::to_string(discard + 2);
    return out;
  }
  out.edges.assign(edges.falling.begin() + static_cast<std::ptrdiff_t>(discard), edges.falling.end());
  for (std::size_t k = 1; k < out.edges.size(); ++k) out.periods.push_back(out.edges[k] - out.edges[k - 1]);
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(std::span<const double> v) {
  // Shifted by the first sample so identical data give exactly zero variance.
  const double n = static_cast<double>(v.size());
  const double shift = v.front();
  double s1 = 0.0;
  for (double x : v) s1 += x - shift;
  const double dm = s1 / n;
  double ss = 0.0;
  for (double x : v) ss += (x - shift - dm) * (x - shift - dm);
  return {shift + dm, ss / (n - 1.0)};
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  return std::sqrt(moments(v).var);
}

}  // namespace

ClockStatistics period_statistics(std::span<const double> periods, int n_bootstrap, std::uint64_t bootstrap_seed) {
  if (periods.size() < 2) throw std::invalid_argument("period_statistics: need at least 2 samples");
  ClockStatistics s;
  s.periods.assign(periods.begin(), periods.end());
  s.n_samples = periods.size();
  const Moments m = moments(periods);
  s.mean_t = m.mean;
  s.var_t = m.var;
  s.n_prec = m.var > 0.0 ? m.mean * m.mean / m.var : std::numeric_limits<double>::infinity();
  if (n_bootstrap < 2 || !(m.var > 0.0)) return s;

  CounterRng rng(bootstrap_seed);
  const std::size_t n = periods.size();
  std::vector<double> boot_mean, boot_var, boot_nprec, boot_ratio, sample(n);
  for (int b = 0; b < n_bootstrap; ++b) {
    for (std::size_t i = 0; i < n; ++i) sample[i] = periods[rng() % n];
    const Moments bm = moments(sample);
    boot_mean.push_back(bm.mean);
    boot_var.push_back(bm.var);
    if (bm.var > 0.0) {
      boot_nprec.push_back(bm.mean * bm.mean / bm.var);
      boot_ratio.push_back(bm.mean / bm.var);
    }
  }
  s.se_mean = stddev(boot_mean);
  s.se_var = stddev(boot_var);
  s.se_nprec = stddev(boot_nprec);
  s.se_nprec_per_mean = stddev(boot_ratio);
  return s;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t k = i;
    while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]]) ++k;
    const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t m = i; m <= k; ++m) r[idx[m]] = avg;
    i = k + 1;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

RankCorrelation spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("spearman: need >= 3 paired samples");
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  RankCorrelation out;
  out.rho = pearson(rx, ry);
  const std::size_t n = x.size();
  if (n <= 9) {
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::size_t extreme = 0, total = 0;
    do {
      ++total;
      if (std::abs(pearson(rx, perm)) >= std::abs(out.rho) - 1e-12) ++extreme;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  } else {
    const double r = std::clamp(out.rho, -0.999999999999, 0.999999999999);
    const double df = static_cast<double>(n) - 2.0;
    const double tstat = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(tstat)));
  }
  return out;
}

}  // namespace limitclock
