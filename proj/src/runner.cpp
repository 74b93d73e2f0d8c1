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

#include "limitclock/runner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include "limitclock/io.hpp"
#include "limitclock/kur.hpp"
#include "limitclock/parallel.hpp"
#include "limitclock/rng.hpp"
#include "limitclock/semiclassical.hpp"
#include "limitclock/thermo.hpp"

namespace limitclock {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sc_period(const ModelParams& p) {
  if (!(p.omega > p.omega0())) return kNan;
  return kTwoPi / limit_cycle_frequency(p.omega, p.omega0());
}

class Outputs {
 public:
  Outputs(const RunConfig& config, RunSummary& summary) : config_(config), summary_(summary) {}

  void table(const std::string& stem, const Table& t) {
    if (config_.format == OutputFormat::kJson) {
      json(stem + ".json", t.to_json());
    } else {
      const auto path = config_.output_dir / (stem + ".csv");
      write_text(path, t.to_csv());
      summary_.outputs.push_back(path);
    }
  }

  void json(const std::string& name, const nlohmann::json& doc) {
    const auto path = config_.output_dir / name;
    write_json(path, doc);
    summary_.outputs.push_back(path);
  }

 private:
  const RunConfig& config_;
  RunSummary& summary_;
};

nlohmann::json statistics_json(const ClockStatistics& s) {
  return {{"mean_t", s.mean_t},   {"var_t", s.var_t},     {"n_prec", s.n_prec},
          {"n_samples", s.n_samples}, {"se_mean", s.se_mean}, {"se_var", s.se_var},
          {"se_nprec", s.se_nprec}};
}

SmeConfig point_config(const RunConfig& rc, const ModelParams& p) {
  SmeConfig sim = rc.sim;
  sim.params = p;
  sim.initial_state.reset();
  if (rc.resolved.at("sim.initial_state") == "excited") sim.initial_state = PureState::excited(p.n_atoms + 1).amplitudes();
  sim.t_final = trajectory_duration(p, rc.periods_per_trajectory, rc.clock.discard_transient);
  return sim;
}

void run_steady_state(const RunConfig& rc, Outputs& out, std::ostream& log) {
  if (rc.beta_grid.empty()) throw ConfigError("sweep.beta_grid", "required for steady-state");
  log << "steady-state: " << rc.n_list.size() << " N values x " << rc.beta_grid.size() << " beta values\n";
  Table t({"beta", "N", "jz_over_n"});
  for (const auto& row : steady_state_sweep(rc.n_list, rc.model.gamma, rc.beta_grid)) {
    t.add_row({row.beta, std::int64_t{row.n_atoms}, row.jz_over_n});
  }
  out.table("steady_state", t);
}

void run_semiclassical(const RunConfig& rc, Outputs& out, std::ostream& log) {
  const SemiclassicalParams sp{rc.model.omega, rc.model.gamma, rc.model.n_atoms, false};
  const double period = sc_period(rc.model);
  double h = rc.sample_dt;
  if (h == 0.0) h = std::isfinite(period) ? period / 200.0 : 0.05 / (rc.model.omega + rc.model.gamma * rc.model.n_atoms);
  const auto n = static_cast<std::size_t>(std::floor(rc.sim.t_final / h + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = static_cast<double>(k) * h;
  log << "semiclassical: " << n << " samples, h=" << format_number(h) << "\n";

  const BlochPoint p0{0.0, 0.5 * std::sin(rc.theta0), 0.5 * std::cos(rc.theta0)};
  const SemiclassicalTrajectory traj = integrate_semiclassical(p0, sp, grid);
  const bool analytic = std::isfinite(period) && rc.theta0 > -std::numbers::pi && rc.theta0 < std::numbers::pi;
  Table t({"t", "X", "Y", "Z", "theta", "theta_analytic"});
  double prev = rc.theta0;
  for (std::size_t k = 0; k < n; ++k) {
    const BlochPoint& p = traj.points[k];
    // Unwrap the numerical angle onto the branch closest to the previous sample.
    double theta = std::atan2(p.y, p.z);
    theta += kTwoPi * std::round((prev - theta) / kTwoPi);
    prev = theta;
    const double ref = analytic ? theta_solution(grid[k], rc.model.omega, rc.model.omega0(), rc.theta0) : kNan;
    t.add_row({grid[k], p.x, p.y, p.z, theta, ref});
  }
  out.table("semiclassical", t);
}

void run_trajectory(const RunConfig& rc, Outputs& out, std::ostream& log, RunSummary& summary) {
  const ModelParams& p = rc.model;
  for (const auto& w : rc.sim.warnings()) summary.warnings.push_back(w);
  log << "trajectory: " << rc.n_traj << " trajectories, dt=" << format_number(rc.sim.resolved_dt())
      << ", t_final=" << format_number(rc.sim.t_final) << "\n";

  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(rc.n_traj));
  std::vector<PeriodExtraction> periods(records.size());
  parallel_for(records.size(), rc.threads, [&](std::size_t i) {
    TrajectoryRecord r = simulate_trajectory(rc.sim, substream_key(rc.master_seed, i));
    periods[i] = extract_periods(r.jz, r.t, p.j(), rc.clock);
    if (i == 0) records[0] = std::move(r);
  });

  const TrajectoryRecord& r0 = records.front();
  const double n = p.n_atoms;
  const SemiclassicalParams sp{p.omega, p.gamma, p.n_atoms, false};
  const SemiclassicalTrajectory sc = integrate_semiclassical({0.0, 0.0, -0.5}, sp, r0.t);
  const auto clock = clock_signal(r0.jz, p.j(), rc.clock);
  Table traj({"t", "jx_c", "jy_c", "jz_c", "current", "purity", "x_sc", "y_sc", "z_sc", "clock"});
  for (std::size_t k = 0; k < r0.size(); ++k) {
    traj.add_row({r0.t[k], r0.jx[k], r0.jy[k], r0.jz[k], r0.current[k], r0.purity[k], n * sc.points[k].x,
                  n * sc.points[k].y, n * sc.points[k].z, std::int64_t{clock[k]}});
  }
  out.table("trajectory", traj);

  Table per({"trajectory_index", "period_index", "T"});
  std::vector<double> pooled;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!periods[i].warning.empty()) summary.warnings.push_back("trajectory " + std::to_string(i) + ": " + periods[i].warning);
    for (std::size_t k = 0; k < periods[i].periods.size(); ++k) {
      per.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(k), periods[i].periods[k]});
      pooled.push_back(periods[i].periods[k]);
    }
  }
  out.table("periods", per);

  nlohmann::json stats;
  stats["semiclassical_period"] = sc_period(p);
  stats["n_traj"] = rc.n_traj;
  if (pooled.size() >= 2) {
    const ClockStatistics s = period_statistics(pooled, rc.bootstrap, substream_key(rc.master_seed, 1u << 20));
    stats["statistics"] = statistics_json(s);
    stats["relative_period_error"] = s.mean_t / sc_period(p) - 1.0;
  } else {
    stats["statistics"] = nullptr;
    summary.warnings.push_back("fewer than 2 periods extracted; no statistics");
  }
  out.json("statistics.json", stats);
}

void run_ensemble(const RunConfig& rc, Outputs& out, std::ostream& log) {
  log << "ensemble: " << rc.n_traj << " trajectories\n";
  const EnsembleMoments m = ensemble_mean(rc.sim, rc.n_traj, rc.master_seed, rc.threads);
  const SpinOperatorSet ops = build_collective_ops(rc.model.n_atoms);
  const PureState psi0 = rc.sim.initial_state ? PureState(*rc.sim.initial_state) : PureState::ground(ops.dim);
  const auto rho = evolve_unconditional(build_liouvillian(ops, rc.model), psi0.to_density(), m.t);
  Table t({"t", "mean_jx", "se_jx", "mean_jy", "se_jy", "mean_jz", "se_jz", "me_jx", "me_jy", "me_jz", "z_jz"});
  double max_z = 0.0;
  for (std::size_t k = 0; k < m.t.size(); ++k) {
    const double jx = expectation_real(rho[k], ops.jx), jy = expectation_real(rho[k], ops.jy);
    const double jz = expectation_real(rho[k], ops.jz);
    const double z = m.se_jz[k] > 0.0 ? (m.mean_jz[k] - jz) / m.se_jz[k] : 0.0;
    max_z = std::max(max_z, std::abs(z));
    t.add_row({m.t[k], m.mean_jx[k], m.se_jx[k], m.mean_jy[k], m.se_jy[k], m.mean_jz[k], m.se_jz[k], jx, jy, jz, z});
  }
  out.table("ensemble", t);
  out.json("ensemble_summary.json", {{"n_traj", m.n_traj}, {"max_abs_z_jz", max_z}, {"samples", m.t.size()}});
}

struct SweepPoint {
  int n_atoms = 0;
  double ratio = 0.0;
  std::vector<double> periods;
  std::optional<ClockStatistics> stats;
  std::optional<KurReport> kur;
  std::string flag;
};

SweepPoint simulate_point(const RunConfig& rc, const ModelParams& p, std::uint64_t seed, std::ostream& log) {
  SweepPoint pt;
  pt.n_atoms = p.n_atoms;
  pt.ratio = p.omega0() / p.omega;
  const SmeConfig sim = point_config(rc, p);
  PooledPeriods pooled = pooled_periods(sim, rc.clock, rc.periods_per_point, seed, rc.threads);
  log << "  N=" << p.n_atoms << " omega0/omega=" << format_number(pt.ratio) << ": " << pooled.periods.size()
      << " periods from " << pooled.n_traj << " trajectories\n";
  pt.periods = std::move(pooled.periods);
  if (pt.periods.size() < 2) {
    pt.flag = "no_periods";
    return pt;
  }
  if (static_cast<int>(pt.periods.size()) < rc.periods_per_point) pt.flag = "short";
  pt.stats = period_statistics(pt.periods, rc.bootstrap, substream_key(seed, 1u << 20));
  if (p.n_atoms <= kMaxKurAtoms) {
    const KineticTerms k = numeric_nq(p);
    pt.kur = kur_test(*pt.stats, k.activity, k.coherence);
  }
  return pt;
}

void run_precision_sweep(const RunConfig& rc, Outputs& out, std::ostream& log, RunSummary& summary) {
  if (rc.ratio_grid.empty()) throw ConfigError("sweep.ratio_grid", "required for precision-sweep");
  log << "precision-sweep: " << rc.n_list.size() * rc.ratio_grid.size() << " points, " << rc.periods_per_point
      << " periods each\n";
  Table prec({"omega0_over_omega", "N", "n_prec", "se", "mean_t", "var_t", "n_samples", "flag"});
  Table kur({"omega0_over_omega", "N", "omega", "gamma", "mean_t", "n_prec", "activity", "coherence",
             "classical_ratio", "se_classical_ratio", "quantum_ratio", "se_quantum_ratio", "classical_violated",
             "quantum_violated"});
  nlohmann::json trends = nlohmann::json::object();
  std::uint64_t index = 0;
  for (int n : rc.n_list) {
    std::vector<double> xs, ys;
    for (double ratio : rc.ratio_grid) {
      ModelParams p = rc.model;
      p.n_atoms = n;
      p.omega = p.omega0() / ratio;
      const SweepPoint pt = simulate_point(rc, p, substream_key(rc.master_seed, index++), log);
      if (!pt.flag.empty()) summary.warnings.push_back("N=" + std::to_string(n) + " ratio=" + format_number(ratio) + ": " + pt.flag);
      const std::int64_t ns = static_cast<std::int64_t>(pt.periods.size());
      if (!pt.stats) {
        prec.add_row({ratio, std::int64_t{n}, kNan, kNan, kNan, kNan, ns, pt.flag});
        kur.add_row({ratio, std::int64_t{n}, p.omega, p.gamma, kNan, kNan, kNan, kNan, kNan, kNan, kNan, kNan,
                     std::int64_t{0}, std::int64_t{0}});
        continue;
      }
      const ClockStatistics& s = *pt.stats;
      prec.add_row({ratio, std::int64_t{n}, s.n_prec, s.se_nprec, s.mean_t, s.var_t, ns, pt.flag});
      xs.push_back(ratio);
      ys.push_back(s.n_prec);
      if (pt.kur) {
        const KurReport& k = *pt.kur;
        kur.add_row({ratio, std::int64_t{n}, p.omega, p.gamma, k.mean_t, k.n_prec, k.activity, k.coherence,
                     k.classical_ratio, k.se_classical_ratio, k.quantum_ratio, k.se_quantum_ratio,
                     std::int64_t{k.classical_violated}, std::int64_t{k.quantum_violated}});
      }
    }
    if (xs.size() >= 3) {
      const RankCorrelation rho = spearman(xs, ys);
      trends[std::to_string(n)] = {{"spearman_rho", rho.rho}, {"p_value", rho.p_value}, {"points", xs.size()}};
    }
  }
  out.table("precision", prec);
  out.table("kur_sweep", kur);
  out.json("precision_summary.json", trends);
}

void run_kur(const RunConfig& rc, Outputs& out, std::ostream& log) {
  if (rc.omega_grid.empty()) throw ConfigError("sweep.omega_grid", "required for kur");
  for (int n : rc.n_list) {
    if (n > kMaxKurAtoms) throw ConfigError("model.n_atoms", "kur supports N <= " + std::to_string(kMaxKurAtoms));
  }
  log << "kur: " << rc.n_list.size() * rc.omega_grid.size() << " points\n";
  Table t({"N", "omega", "gamma", "activity", "coherence", "activity_analytic", "coherence_analytic",
           "rel_err_activity", "rel_err_coherence", "mean_t", "n_prec", "classical_ratio", "se_classical_ratio",
           "quantum_ratio", "se_quantum_ratio"});
  std::uint64_t index = 0;
  for (int n : rc.n_list) {
    for (double omega : rc.omega_grid) {
      ModelParams p = rc.model;
      p.n_atoms = n;
      p.omega = omega;
      const KineticTerms num = numeric_nq(p);
      KineticTerms ana{kNan, kNan};
      if (n == 2 || n == 3) ana = analytic_nq(n, omega, p.gamma);
      auto rel = [](double a, double b) { return std::isfinite(b) && b != 0.0 ? std::abs(a / b - 1.0) : kNan; };
      std::vector<Table::Cell> row{std::int64_t{n}, omega, p.gamma, num.activity, num.coherence, ana.activity,
                                   ana.coherence, rel(num.activity, ana.activity), rel(num.coherence, ana.coherence)};
      const std::uint64_t seed = substream_key(rc.master_seed, index++);
      if (rc.simulate && omega > p.omega0()) {
        const SweepPoint pt = simulate_point(rc, p, seed, log);
        if (pt.kur) {
          const KurReport& k = *pt.kur;
          row.insert(row.end(), {k.mean_t, k.n_prec, k.classical_ratio, k.se_classical_ratio, k.quantum_ratio,
                                 k.se_quantum_ratio});
        }
      }
      while (row.size() < t.columns().size()) row.emplace_back(kNan);
      t.add_row(std::move(row));
    }
  }
  out.table("kur", t);
}

void run_thermo(const RunConfig& rc, Outputs& out, std::ostream& log, RunSummary& summary) {
  const ModelParams& p = rc.model;
  for (const auto& w : rc.sim.warnings()) summary.warnings.push_back(w);
  log << "thermo: " << rc.n_traj << " trajectories, t_final=" << format_number(rc.sim.t_final) << "\n";

  struct PerTrajectory {
    EnergyLedger ledger;
    CyclePairs pairs;
    std::string warning;
  };
  std::vector<PerTrajectory> results(static_cast<std::size_t>(rc.n_traj));
  parallel_for(results.size(), rc.threads, [&](std::size_t i) {
    const TrajectoryRecord r = simulate_trajectory(rc.sim, substream_key(rc.master_seed, i));
    const PeriodExtraction ex = extract_periods(r.jz, r.t, p.j(), rc.clock);
    EnergyLedger ledger = dissipated_energy(r, p);
    results[i].pairs = cycle_pairs(ledger, ex.edges);
    results[i].warning = ex.warning;
    if (i == 0) results[i].ledger = std::move(ledger);
  });

  const EnergyLedger& l0 = results.front().ledger;
  Table ledger({"t", "p_in", "p_out", "e_dis"});
  for (std::size_t k = 0; k < l0.t.size(); ++k) ledger.add_row({l0.t[k], l0.p_in[k], l0.p_out[k], l0.e_dis[k]});
  out.table("ledger", ledger);

  Table cycles({"trajectory_index", "cycle", "T", "delta_e"});
  CyclePairs pooled;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].warning.empty()) summary.warnings.push_back("trajectory " + std::to_string(i) + ": " + results[i].warning);
    const CyclePairs& c = results[i].pairs;
    for (std::size_t k = 0; k < c.periods.size(); ++k) {
      cycles.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(k), c.periods[k], c.delta_e[k]});
      pooled.periods.push_back(c.periods[k]);
      pooled.delta_e.push_back(c.delta_e[k]);
    }
  }
  out.table("cycles", cycles);

  // First-law moment identity along the unconditional evolution.
  double residual = kNan;
  if (p.n_atoms <= 30) {
    const SpinOperatorSet ops = build_collective_ops(p.n_atoms);
    const Superoperator l = build_liouvillian(ops, p);
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(k * 0.1 * sc_period(p));
    if (!std::isfinite(grid.back())) for (int k = 0; k <= 20; ++k) grid[k] = k * 0.1;
    residual = 0.0;
    for (const auto& rho : evolve_unconditional(l, PureState::ground(ops.dim).to_density(), grid)) {
      const PowerBalance b = power_balance(rho, ops, p);
      residual = std::max(residual, std::abs(jz_rate(rho, ops, p) - b.de_dt));
    }
  }

  nlohmann::json fit{{"cycles", pooled.periods.size()},
                     {"expected_slope", p.omega_a * p.gamma * p.n_atoms * p.n_atoms / 4.0},
                     {"first_law_residual", residual}};
  if (pooled.periods.size() >= 2) {
    const CycleDissipation d = cycle_dissipation(pooled, 2);
    fit["slope"] = d.fit.slope;
    fit["intercept"] = d.fit.intercept;
    fit["pearson_r"] = d.fit.pearson_r;
    fit["relative_slope_error"] = d.fit.slope / fit["expected_slope"].get<double>() - 1.0;
    if (pooled.periods.size() < 50) summary.warnings.push_back("fewer than 50 cycles; fit is unreliable");
  } else {
    summary.warnings.push_back("fewer than 2 cycles; no fit");
  }
  out.json("fit.json", fit);
}

nlohmann::json manifest_json(const RunConfig& rc, const std::string& status, double wall, const RunSummary& s,
                             const std::string& error) {
  nlohmann::json m;
  m["toolkit_version"] = kToolkitVersion;
  m["command"] = command_name(rc.command);
  m["config"] = rc.resolved;
  m["status"] = status;
  m["wall_time_s"] = wall;
  m["warnings"] = s.warnings;
  nlohmann::json sums = nlohmann::json::object();
  for (const auto& path : s.outputs) sums[path.filename().string()] = file_checksum(path);
  m["outputs"] = sums;
  if (!error.empty()) m["error"] = error;
  return m;
}

}  // namespace

double trajectory_duration(const ModelParams& params, int periods, int discard) {
  const double period = sc_period(params);
  if (!std::isfinite(period)) {
    throw ConfigError("model.omega", "clock statistics need Omega > Omega0 = " + format_number(params.omega0()));
  }
  return (periods + discard + 1) * period;
}

PooledPeriods pooled_periods(const SmeConfig& base, const ClockSignalConfig& clock, int target,
                             std::uint64_t master_seed, unsigned threads, int max_traj) {
  constexpr int kBatch = 8;
  PooledPeriods out;
  const auto goal = static_cast<std::size_t>(target);
  int next = 0;
  while (out.periods.size() < goal && next < max_traj) {
    const int count = std::min(kBatch, max_traj - next);
    std::vector<PeriodExtraction> batch(static_cast<std::size_t>(count));
    parallel_for(batch.size(), threads, [&](std::size_t k) {
      const TrajectoryRecord r = simulate_trajectory(base, substream_key(master_seed, next + k));
      batch[k] = extract_periods(r.jz, r.t, base.params.j(), clock);
    });
    for (int k = 0; k < count; ++k) {
      const auto& b = batch[static_cast<std::size_t>(k)];
      if (!b.warning.empty()) out.warnings.push_back("trajectory " + std::to_string(next + k) + ": " + b.warning);
      for (double T : b.periods) {
        out.periods.push_back(T);
        out.trajectory_index.push_back(static_cast<std::size_t>(next + k));
      }
    }
    next += count;
  }
  out.n_traj = next;
  if (out.periods.size() > goal) {
    out.periods.resize(goal);
    out.trajectory_index.resize(goal);
  }
  return out;
}

RunSummary run(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  std::filesystem::create_directories(config.output_dir);
  const auto manifest = config.output_dir / "manifest.json";
  RunSummary summary;
  write_json(manifest, manifest_json(config, "running", 0.0, summary, ""));

  Outputs out(config, summary);
  try {
    switch (config.command) {
      case Command::kSteadyState: run_steady_state(config, out, log); break;
      case Command::kSemiclassical: run_semiclassical(config, out, log); break;
      case Command::kTrajectory: run_trajectory(config, out, log, summary); break;
      case Command::kEnsemble: run_ensemble(config, out, log); break;
      case Command::kPrecisionSweep: run_precision_sweep(config, out, log, summary); break;
      case Command::kKur: run_kur(config, out, log); break;
      case Command::kThermo: run_thermo(config, out, log, summary); break;
    }
  } catch (const std::exception& e) {
    write_json(manifest, manifest_json(config, "failed", elapsed(), summary, e.what()));
    throw;
  }
  for (const auto& w : summary.warnings) log << "warning: " << w << "\n";
  write_json(manifest, manifest_json(config, "ok", elapsed(), summary, ""));
  return summary;
}

}  // namespace limitclock
