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

#include "limitclock/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "limitclock/io.hpp"
#include "limitclock/parallel.hpp"

namespace limitclock {

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::kSteadyState, "steady-state"}, {Command::kSemiclassical, "semiclassical"},
    {Command::kTrajectory, "trajectory"},    {Command::kEnsemble, "ensemble"},
    {Command::kPrecisionSweep, "precision-sweep"}, {Command::kKur, "kur"},
    {Command::kThermo, "thermo"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(std::string(field), "expected a number, got '" + t + "'");
  }
  return v;
}

long long to_int(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(std::string(field), "expected an integer, got '" + t + "'");
  }
  return v;
}

std::uint64_t to_u64(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(std::string(field), "expected an unsigned 64-bit integer, got '" + t + "'");
  }
  return v;
}

bool to_bool(std::string_view field, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(std::string(field), "expected true/false, got '" + t + "'");
}

KeyValues defaults_for(Command c) {
  KeyValues kv = {
      {"model.phi", "0"},
      {"model.omega_a", "1"},
      {"sim.record_stride", "10"},
      {"sim.engine", "pure"},
      {"sim.initial_state", "ground"},
      {"sim.theta0", "1.5707963267948966"},
      {"sim.sample_dt", "0"},
      {"clock.hysteresis", "0.25"},
      {"clock.discard_transient", "2"},
      {"clock.pooling", "long"},
      {"clock.periods_per_trajectory", "0"},
      {"run.n_traj", "1"},
      {"run.master_seed", "1"},
      {"run.output_dir", "out"},
      {"run.format", "csv"},
      {"run.threads", std::to_string(default_thread_count())},
      {"sweep.periods_per_point", "10000"},
      {"sweep.bootstrap", "1000"},
      {"sweep.simulate", "false"},
  };
  auto set = [&kv](std::string k, std::string v) { kv[std::move(k)] = std::move(v); };
  switch (c) {
    case Command::kSteadyState:
      set("model.n_atoms", "5,10,20,70");
      set("model.gamma", "0.1");
      set("sweep.beta_grid", "0:3:0.05");
      break;
    case Command::kSemiclassical:
    case Command::kTrajectory:
      set("model.n_atoms", "10");
      set("model.gamma", "0.1");
      set("model.omega", "6.283185307179586");
      break;
    case Command::kEnsemble:
      set("model.n_atoms", "2");
      set("model.gamma", "0.5");
      set("model.omega", "1");
      set("sim.t_final", "10");
      set("sim.dt", "0.0001");
      set("sim.record_stride", "1000");
      set("run.n_traj", "2000");
      break;
    case Command::kPrecisionSweep:
      set("model.n_atoms", "1,2,3");
      set("model.gamma", "1");
      set("sweep.ratio_grid", "0.1:0.6:0.1");
      break;
    case Command::kKur:
      set("model.n_atoms", "2");
      set("model.gamma", "1");
      set("sweep.omega_grid", "0.1,0.2,0.5,1,2,5,10");
      set("sweep.periods_per_point", "1000");
      break;
    case Command::kThermo:
      set("model.n_atoms", "20");
      set("model.gamma", "0.1");
      set("model.omega", "6.283185307179586");
      set("run.n_traj", "4");
      break;
  }
  return kv;
}

std::vector<int> parse_atoms(const KeyValues& kv) {
  std::vector<int> out;
  const auto nit = kv.find("model.n_atoms");
  const auto jit = kv.find("model.j");
  if (nit != kv.end()) {
    for (const auto& item : split(nit->second, ',')) {
      const long long n = to_int("model.n_atoms", item);
      if (n < 1) throw ConfigError("model.n_atoms", "must be a positive integer");
      out.push_back(static_cast<int>(n));
    }
  }
  if (jit != kv.end()) {
    std::vector<int> from_j;
    for (const auto& item : split(jit->second, ',')) from_j.push_back(n_atoms_from_j(to_double("model.j", item)));
    if (nit != kv.end() && from_j != out) {
      throw ConfigError("model.j", "inconsistent with model.n_atoms (j must equal n_atoms/2)");
    }
    out = from_j;
  }
  if (out.empty()) throw ConfigError("model.n_atoms", "required");
  return out;
}

double limit_cycle_period(const ModelParams& p) {
  const double w0 = p.omega0();
  if (p.omega <= w0) return 0.0;
  return 2.0 * std::numbers::pi / std::sqrt(p.omega * p.omega - w0 * w0);
}

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommandNames) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommandNames) {
    if (n == name) return cmd;
  }
  throw ConfigError("command", "unknown command '" + std::string(name) + "'");
}

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"model", "n_atoms", "--n-atoms", "--n", "number of atoms N (comma list for sweeps)"},
      {"model", "j", "--j", "", "collective spin j = N/2 (alternative to n_atoms)"},
      {"model", "omega", "--omega", "", "Rabi frequency"},
      {"model", "gamma", "--gamma", "", "collective emission rate"},
      {"model", "phi", "--phi", "", "local-oscillator phase"},
      {"model", "omega_a", "--omega-a", "", "transition frequency (energy unit)"},
      {"sim", "dt", "--dt", "", "SME time step (default: automatic)"},
      {"sim", "t_final", "--t-final", "", "duration per trajectory (default: automatic)"},
      {"sim", "record_stride", "--record-stride", "", "record every n-th step"},
      {"sim", "engine", "--engine", "", "pure | density"},
      {"sim", "initial_state", "--initial-state", "", "ground | excited"},
      {"sim", "theta0", "--theta0", "", "semiclassical initial angle"},
      {"sim", "sample_dt", "--sample-dt", "", "semiclassical output spacing (0 = automatic)"},
      {"clock", "hysteresis", "--hysteresis", "", "Schmitt threshold in units of j"},
      {"clock", "discard_transient", "--discard-transient", "", "leading periods dropped per trajectory"},
      {"clock", "pooling", "--pooling", "", "long | short trajectories"},
      {"clock", "periods_per_trajectory", "--periods-per-trajectory", "", "target periods per trajectory (0 = from pooling)"},
      {"run", "n_traj", "--n-traj", "", "number of trajectories"},
      {"run", "master_seed", "--master-seed", "--seed", "64-bit master seed"},
      {"run", "output_dir", "--output-dir", "-o", "output directory (env LIMITCLOCK_OUTPUT_DIR)"},
      {"run", "format", "--format", "", "csv | json"},
      {"run", "threads", "--threads", "", "worker threads"},
      {"sweep", "beta_grid", "--beta-grid", "", "Omega/Omega0 grid (a:b:step or list)"},
      {"sweep", "omega_grid", "--omega-grid", "", "Rabi frequency grid"},
      {"sweep", "ratio_grid", "--ratio-grid", "", "Omega0/Omega grid"},
      {"sweep", "periods_per_point", "--periods-per-point", "", "pooled periods per sweep point"},
      {"sweep", "bootstrap", "--bootstrap", "", "bootstrap resamples"},
      {"sweep", "simulate", "--simulate", "", "kur: also simulate clock statistics"},
  };
  return keys;
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where, "unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      const auto& keys = config_keys();
      if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.section == section; })) {
        throw ConfigError(where, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (section.empty()) throw ConfigError(where, "key '" + key + "' outside a section");
    const auto& keys = config_keys();
    if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.section == section && k.key == key; })) {
      throw ConfigError(section + "." + key, "unknown key");
    }
    kv[section + "." + key] = value;
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<double> parse_grid(std::string_view field, std::string_view text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError(std::string(field), "range must be start:stop:step");
    const double a = to_double(field, parts[0]), b = to_double(field, parts[1]), h = to_double(field, parts[2]);
    if (!(h > 0.0) || b < a) throw ConfigError(std::string(field), "range needs step > 0 and stop >= start");
    const auto n = static_cast<long long>(std::floor((b - a) / h + 1e-9));
    for (long long k = 0; k <= n; ++k) {
      // Round-trip through 12 significant digits so 0.1:0.6:0.1 yields 0.3, not 0.30000000000000004.
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, a + static_cast<double>(k) * h,
                                     std::chars_format::general, 12);
      double v = 0.0;
      std::from_chars(buf, res.ptr, v);
      out.push_back(v);
    }
  } else {
    for (const auto& item : split(t, ',')) out.push_back(to_double(field, item));
  }
  if (out.empty()) throw ConfigError(std::string(field), "empty grid");
  return out;
}

RunConfig build_run_config(Command command, const KeyValues& values) {
  KeyValues kv = defaults_for(command);
  for (const auto& [k, v] : values) kv[k] = v;
  if (values.count("model.j") && !values.count("model.n_atoms")) kv.erase("model.n_atoms");

  RunConfig rc;
  rc.command = command;
  auto get = [&kv](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(key, "required for this command");
    return it->second;
  };
  auto has = [&kv](const std::string& key) { return kv.count(key) > 0; };

  rc.n_list = parse_atoms(kv);
  rc.model.n_atoms = rc.n_list.front();
  const bool sweep = command == Command::kSteadyState || command == Command::kPrecisionSweep || command == Command::kKur;
  if (!sweep && rc.n_list.size() != 1) throw ConfigError("model.n_atoms", "this command takes a single N");

  rc.model.gamma = to_double("model.gamma", get("model.gamma"));
  if (!(rc.model.gamma > 0.0)) throw ConfigError("model.gamma", "must be > 0");
  if (has("model.omega")) {
    rc.model.omega = to_double("model.omega", get("model.omega"));
    if (!(rc.model.omega >= 0.0)) throw ConfigError("model.omega", "must be >= 0");
  } else if (command == Command::kSemiclassical || command == Command::kTrajectory ||
             command == Command::kEnsemble || command == Command::kThermo) {
    throw ConfigError("model.omega", "required for this command");
  }
  rc.model.phi = to_double("model.phi", get("model.phi"));
  rc.model.omega_a = to_double("model.omega_a", get("model.omega_a"));
  if (!(rc.model.omega_a > 0.0)) throw ConfigError("model.omega_a", "must be > 0");

  rc.sim.params = rc.model;
  if (has("sim.dt")) {
    rc.sim.dt = to_double("sim.dt", get("sim.dt"));
    if (!(rc.sim.dt > 0.0)) throw ConfigError("sim.dt", "must be > 0 (omit the key for the automatic step)");
  } else {
    kv["sim.dt"] = "auto";
  }
  rc.sim.record_stride = static_cast<int>(to_int("sim.record_stride", get("sim.record_stride")));
  if (rc.sim.record_stride < 1) throw ConfigError("sim.record_stride", "must be >= 1");
  const std::string& engine = get("sim.engine");
  if (engine == "pure") rc.sim.engine = Engine::kPureState;
  else if (engine == "density") rc.sim.engine = Engine::kDensityMatrix;
  else throw ConfigError("sim.engine", "must be 'pure' or 'density'");
  const std::string& init = get("sim.initial_state");
  if (init == "excited") rc.sim.initial_state = PureState::excited(rc.model.n_atoms + 1).amplitudes();
  else if (init != "ground") throw ConfigError("sim.initial_state", "must be 'ground' or 'excited'");
  rc.theta0 = to_double("sim.theta0", get("sim.theta0"));
  rc.sample_dt = to_double("sim.sample_dt", get("sim.sample_dt"));
  if (rc.sample_dt < 0.0) throw ConfigError("sim.sample_dt", "must be >= 0");

  double t_final = 0.0;
  if (has("sim.t_final")) {
    t_final = to_double("sim.t_final", get("sim.t_final"));
    if (!(t_final > 0.0)) throw ConfigError("sim.t_final", "must be > 0 (omit the key for the automatic duration)");
  } else {
    const double period = limit_cycle_period(rc.model);
    const double scale = period > 0.0 ? period : 2.0 * std::numbers::pi / std::max(rc.model.omega0(), 1e-12);
    switch (command) {
      case Command::kThermo: t_final = 150.0 * scale; break;
      case Command::kSemiclassical: t_final = 10.0 * scale; break;
      default: t_final = 40.0 * scale; break;
    }
    const bool per_point = command == Command::kPrecisionSweep || command == Command::kKur;
    kv["sim.t_final"] = per_point ? "per-point" : format_number(t_final);
  }
  rc.sim.t_final = t_final;

  rc.clock.hysteresis = to_double("clock.hysteresis", get("clock.hysteresis"));
  rc.clock.discard_transient = static_cast<int>(to_int("clock.discard_transient", get("clock.discard_transient")));
  rc.clock.validate();
  rc.pooling = get("clock.pooling");
  if (rc.pooling != "long" && rc.pooling != "short") throw ConfigError("clock.pooling", "must be 'long' or 'short'");
  rc.periods_per_trajectory = static_cast<int>(to_int("clock.periods_per_trajectory", get("clock.periods_per_trajectory")));
  if (rc.periods_per_trajectory < 0) throw ConfigError("clock.periods_per_trajectory", "must be >= 0");
  if (rc.periods_per_trajectory == 0) rc.periods_per_trajectory = rc.pooling == "long" ? 100 : 10;

  const long long n_traj = to_int("run.n_traj", get("run.n_traj"));
  if (n_traj < 1) throw ConfigError("run.n_traj", "must be >= 1");
  rc.n_traj = static_cast<int>(n_traj);
  rc.master_seed = to_u64("run.master_seed", get("run.master_seed"));
  rc.output_dir = get("run.output_dir");
  const std::string& fmt = get("run.format");
  if (fmt == "csv") rc.format = OutputFormat::kCsv;
  else if (fmt == "json") rc.format = OutputFormat::kJson;
  else throw ConfigError("run.format", "must be 'csv' or 'json'");
  const long long threads = to_int("run.threads", get("run.threads"));
  if (threads < 1) throw ConfigError("run.threads", "must be >= 1");
  rc.threads = static_cast<unsigned>(threads);

  if (has("sweep.beta_grid")) rc.beta_grid = parse_grid("sweep.beta_grid", get("sweep.beta_grid"));
  if (has("sweep.omega_grid")) rc.omega_grid = parse_grid("sweep.omega_grid", get("sweep.omega_grid"));
  if (has("sweep.ratio_grid")) rc.ratio_grid = parse_grid("sweep.ratio_grid", get("sweep.ratio_grid"));
  for (double r : rc.ratio_grid) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("sweep.ratio_grid", "Omega0/Omega values must lie in (0, 1)");
  }
  for (double w : rc.omega_grid) {
    if (!(w >= 0.0)) throw ConfigError("sweep.omega_grid", "Rabi frequencies must be >= 0");
  }
  rc.periods_per_point = static_cast<int>(to_int("sweep.periods_per_point", get("sweep.periods_per_point")));
  if (rc.periods_per_point < 2) throw ConfigError("sweep.periods_per_point", "must be >= 2");
  rc.bootstrap = static_cast<int>(to_int("sweep.bootstrap", get("sweep.bootstrap")));
  if (rc.bootstrap < 0) throw ConfigError("sweep.bootstrap", "must be >= 0");
  rc.simulate = to_bool("sweep.simulate", get("sweep.simulate"));

  if (command == Command::kEnsemble && rc.n_traj < 2) throw ConfigError("run.n_traj", "ensemble needs >= 2 trajectories");
  rc.sim.validate();
  rc.resolved = kv;
  rc.resolved["run.command"] = std::string(command_name(command));
  return rc;
}

}  // namespace limitclock
