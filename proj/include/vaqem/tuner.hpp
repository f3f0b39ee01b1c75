// Copyright 2026 The VAQEM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/hamiltonian.hpp"
#include "vaqem/mitigation.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/objective.hpp"
#include "vaqem/spsa.hpp"

namespace vaqem {

/// Sweep resolution. `positions` gate fractions are spaced evenly over
/// [0, 1]; round counts are subsampled to at most `round_values`; a joint
/// gate-shift and DD sweep keeps at most `joint_cap` points per kind.
struct SweepGrid {
  int positions = 9;
  int round_values = 16;
  int joint_cap = 64;

  void validate() const {
    if (positions < 2) throw ConfigError("sweep grid needs at least 2 gate positions");
    if (round_values < 2) throw ConfigError("sweep grid needs at least 2 round values");
    if (joint_cap < 4) throw ConfigError("joint sweep cap must be at least 4");
  }
};

struct TuneOptions {
  SweepGrid grid;
  bool gate_shift = true;
  std::vector<DDKind> kinds{DDKind::XY4};  // empty: no DD
  Cycles min_len = 2;                      // shorter windows are never tuned
  SimOptions sim;
};

/// Outcome of sweeping one window with every other window at baseline.
struct WindowReport {
  IdleWindow window;
  bool movable = false;
  WindowSetting chosen;
  double chosen_value = 0.0;
  double baseline_value = 0.0;
  std::size_t points = 0;
};

struct TuneResult {
  MitigationConfig config;
  std::vector<WindowReport> windows;
  std::size_t evaluations = 0;
};

/// Gate fractions i / (n - 1); the last one is exactly 1.
inline std::vector<double> fraction_grid(int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1));
  return out;
}

/// At most `n` round counts from 0..max_r, evenly spaced, always holding 0,
/// 1 and max_r.
inline std::vector<int> round_grid(int max_r, int n) {
  std::set<int> picked{0};
  if (max_r >= 1) picked.insert(1);
  if (max_r + 1 <= n) {
    for (int r = 0; r <= max_r; ++r) picked.insert(r);
  } else {
    for (int i = 0; i < n - 1; ++i) {
      picked.insert(static_cast<int>(std::llround(static_cast<double>(i) * max_r / (n - 1))));
    }
    picked.insert(max_r);
  }
  return {picked.begin(), picked.end()};
}

/// True when `a` is the smaller intervention: fewer rounds, then a fraction
/// nearer to 1.
inline bool closer_to_baseline(const WindowSetting& a, const WindowSetting& b) {
  if (a.rounds != b.rounds) return a.rounds < b.rounds;
  return std::abs(1.0 - a.fraction) < std::abs(1.0 - b.fraction);
}

inline constexpr double kTieTolerance = 1e-9;

/// Candidate settings for one window, baseline first.
inline std::vector<WindowSetting> sweep_points(const TimedCircuit& tc, const IdleWindow& w, const TuneOptions& opt) {
  const auto& grid = opt.grid;
  const bool movable = opt.gate_shift && has_movable_gate(tc, w);
  const auto fractions = movable ? fraction_grid(grid.positions) : std::vector<double>{1.0};
  const DDKind first = opt.kinds.empty() ? DDKind::XY4 : opt.kinds.front();
  std::vector<WindowSetting> out{WindowSetting{first, 0, 1.0}};
  for (double f : fractions) {
    if (f != 1.0) out.push_back(WindowSetting{first, 0, f});
  }
  for (DDKind kind : opt.kinds) {
    const int max_r = max_rounds(w, kind, tc.durations);
    if (max_r < 1) continue;
    int values = grid.round_values;
    if (fractions.size() > 1) {
      values = std::min<int>(values, std::max<int>(2, grid.joint_cap / static_cast<int>(fractions.size())));
    }
    for (int r : round_grid(max_r, values)) {
      if (r == 0) continue;
      for (double f : fractions) {
        if (r > max_rounds_with_shift(w, f, kind, tc.durations)) continue;
        if (!split_rounds(w, f, kind, r, tc.durations) && f != 1.0) continue;
        out.push_back(WindowSetting{kind, r, f});
      }
    }
  }
  return out;
}

/// Tunes each window independently at fixed angles. Every sweep holds the
/// baseline setting, so the chosen value never exceeds the baseline value.
inline TuneResult tune_windows(const TimedCircuit& tc, std::span<const double> theta, const PauliHamiltonian& h,
                               std::span<const IdleWindow> windows, const NoiseModel& noise,
                               const TuneOptions& opt = {}) {
  opt.grid.validate();
  TuneResult result;
  const auto eval = [&](const TimedCircuit& c) {
    ++result.evaluations;
    return objective(c, theta, h, noise, opt.sim);
  };
  const double baseline = eval(tc);
  for (const auto& w : windows) {
    WindowReport rep;
    rep.window = w;
    rep.movable = has_movable_gate(tc, w);
    rep.baseline_value = baseline;
    rep.chosen_value = baseline;
    rep.chosen = WindowSetting{opt.kinds.empty() ? DDKind::XY4 : opt.kinds.front(), 0, 1.0};
    if (w.length() >= opt.min_len) {
      const auto points = sweep_points(tc, w, opt);
      rep.points = points.size();
      for (const auto& s : points) {
        if (s.is_baseline()) continue;
        const double v = eval(apply_window(tc, w, s));
        const bool better = v < rep.chosen_value - kTieTolerance;
        const bool tie = std::abs(v - rep.chosen_value) <= kTieTolerance && closer_to_baseline(s, rep.chosen);
        if (better || tie) {
          rep.chosen = s;
          rep.chosen_value = v;
        }
      }
    }
    result.config.windows.push_back(WindowConfig{w, rep.chosen});
    result.windows.push_back(rep);
  }
  return result;
}

/// One round of `kind` in every window long enough to hold it.
inline MitigationConfig fixed_dd_config(const TimedCircuit& tc, std::span<const IdleWindow> windows, DDKind kind,
                                        Cycles min_len = 2) {
  MitigationConfig cfg;
  for (const auto& w : windows) {
    const bool fits = w.length() >= min_len && max_rounds(w, kind, tc.durations) >= 1;
    cfg.windows.push_back(WindowConfig{w, WindowSetting{kind, fits ? 1 : 0, 1.0}});
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Two-stage flow

enum class ThetaInit { Random, Zeros, Explicit };

struct ExperimentConfig {
  AnsatzSpec ansatz;
  PauliHamiltonian hamiltonian = tfim_hamiltonian(4, 1.0, 1.0);
  std::string hamiltonian_source = "tfim";
  NoiseModel noise = NoiseModel::defaults();
  std::string noise_source = "defaults";
  SpsaSettings spsa;
  ThetaInit theta_init = ThetaInit::Random;
  std::vector<double> theta0;         // used when theta_init is Explicit
  bool noiseless_angles = false;      // stage 1 against the ideal simulator
  SweepGrid grid;
  std::vector<DDKind> dd_kinds{DDKind::XY4, DDKind::XX};
  SimOptions tuning;                  // objective used by both stages
  SimOptions evaluation{ObjectiveMode::Sampled, 0, true, 1, 0};
  std::vector<std::string> ladder;    // empty: every entry
  std::uint64_t seed = 1;

  void validate() const;
};

inline const std::vector<std::string>& ladder_names() {
  static const std::vector<std::string> names{"no_em",   "baseline_mem", "dd_xx",      "dd_xy4",
                                              "vaqem_dd", "vaqem_gs",    "vaqem_gs_xy"};
  return names;
}

inline void ExperimentConfig::validate() const {
  if (ansatz.n_qubits < 1) throw ConfigError("ansatz needs at least one qubit");
  if (ansatz.reps < 1) throw ConfigError("ansatz reps must be at least 1");
  if (hamiltonian.n_qubits != ansatz.n_qubits) {
    throw ConfigError("Hamiltonian has " + std::to_string(hamiltonian.n_qubits) + " qubits but the ansatz has " +
                      std::to_string(ansatz.n_qubits));
  }
  if (ansatz.n_qubits > kMaxDenseQubits) throw ConfigError("at most 10 qubits are supported");
  noise.validate(ansatz.n_qubits);
  spsa.validate();
  grid.validate();
  if (theta_init == ThetaInit::Explicit &&
      theta0.size() != static_cast<std::size_t>(ansatz.num_parameters())) {
    throw ConfigError("theta0 has " + std::to_string(theta0.size()) + " entries, ansatz needs " +
                      std::to_string(ansatz.num_parameters()));
  }
  for (const auto& name : ladder) {
    if (std::find(ladder_names().begin(), ladder_names().end(), name) == ladder_names().end()) {
      throw ConfigError("unknown ladder entry '" + name + "'");
    }
  }
}

struct LadderEntry {
  std::string name;
  double value = 0.0;
  MitigationConfig config;
};

struct StageTimings {
  double angles_seconds = 0.0;
  double mitigation_seconds = 0.0;
  double ladder_seconds = 0.0;
};

struct VaqemReport {
  std::vector<double> theta0;
  TuneTrace trace;
  std::vector<IdleWindow> windows;
  TuneResult tuned;        // the GS+XY sweep (the main result)
  TuneResult tuned_dd;     // DD-only sweep
  TuneResult tuned_gs;     // gate-shift-only sweep
  std::vector<LadderEntry> ladder;
  std::optional<double> e0;
  StageTimings timings;

  const LadderEntry* entry(const std::string& name) const {
    for (const auto& e : ladder) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

inline std::vector<double> initial_angles(const ExperimentConfig& cfg) {
  const auto d = static_cast<std::size_t>(cfg.ansatz.num_parameters());
  switch (cfg.theta_init) {
    case ThetaInit::Explicit: return cfg.theta0;
    case ThetaInit::Zeros: return std::vector<double>(d, 0.0);
    case ThetaInit::Random: break;
  }
  std::mt19937_64 rng(cfg.seed ^ 0x5851F42D4C957F2DULL);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> out(d);
  for (auto& x : out) x = u(rng);
  return out;
}

/// Stage 1 tunes the angles on the ALAP circuit, stage 2 tunes mitigation per
/// window at the tuned angles, then every ladder entry is evaluated at those
/// angles under one seed and noise model.
inline VaqemReport vaqem_run(const ExperimentConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  VaqemReport rep;
  const auto& h = cfg.hamiltonian;
  const auto tc = schedule_alap(su2_ansatz(cfg.ansatz), cfg.noise.durations);
  SimOptions tuning = cfg.tuning;
  tuning.seed = cfg.seed;
  SimOptions evaluation = cfg.evaluation;
  evaluation.seed = cfg.seed;
  if (h.n_qubits <= 12) rep.e0 = exact_ground_energy(h).energy;

  auto t0 = clock::now();
  const NoiseModel angle_noise = cfg.noiseless_angles ? NoiseModel::ideal() : cfg.noise;
  rep.theta0 = initial_angles(cfg);
  SpsaSettings spsa = cfg.spsa;
  spsa.seed = cfg.seed;
  rep.trace = spsa_minimize([&](std::span<const double> p) { return objective(tc, p, h, angle_noise, tuning); },
                            rep.theta0, spsa);
  rep.timings.angles_seconds = seconds_since(t0);
  if (rep.trace.aborted) throw SimulationError("angle tuning aborted: " + rep.trace.abort_reason);
  const auto& theta = rep.trace.best_params;

  t0 = clock::now();
  rep.windows = extract_idle_windows(tc, 1);
  TuneOptions opt;
  opt.grid = cfg.grid;
  opt.sim = tuning;
  const auto want = [&](const std::string& name) {
    return cfg.ladder.empty() || std::find(cfg.ladder.begin(), cfg.ladder.end(), name) != cfg.ladder.end();
  };
  if (want("vaqem_gs_xy")) {
    opt.gate_shift = true;
    opt.kinds = {DDKind::XY4};
    rep.tuned = tune_windows(tc, theta, h, rep.windows, cfg.noise, opt);
  }
  if (want("vaqem_dd")) {
    opt.gate_shift = false;
    opt.kinds = cfg.dd_kinds;
    rep.tuned_dd = tune_windows(tc, theta, h, rep.windows, cfg.noise, opt);
  }
  if (want("vaqem_gs")) {
    opt.gate_shift = true;
    opt.kinds = {};
    rep.tuned_gs = tune_windows(tc, theta, h, rep.windows, cfg.noise, opt);
  }
  rep.timings.mitigation_seconds = seconds_since(t0);

  t0 = clock::now();
  std::optional<Eigen::MatrixXd> mem;
  if (evaluation.mode == ObjectiveMode::Sampled && evaluation.mem && cfg.noise.has_readout_error()) {
    mem = mem_calibrate(tc.n_qubits, cfg.noise, MemOptions{evaluation.shots, cfg.seed, tc.n_qubits > 6});
  }
  const auto evaluate = [&](const std::string& name, const MitigationConfig& mc, bool use_mem) {
    SimOptions o = evaluation;
    o.mem = use_mem && mem.has_value();
    const auto circuit = apply_config(tc, rep.windows, mc);
    rep.ladder.push_back(LadderEntry{name, objective(circuit, theta, h, cfg.noise, o, mem ? &*mem : nullptr), mc});
  };
  for (const auto& name : ladder_names()) {
    if (!want(name)) continue;
    if (name == "no_em") evaluate(name, {}, false);
    if (name == "baseline_mem") evaluate(name, {}, true);
    if (name == "dd_xx") evaluate(name, fixed_dd_config(tc, rep.windows, DDKind::XX), true);
    if (name == "dd_xy4") evaluate(name, fixed_dd_config(tc, rep.windows, DDKind::XY4), true);
    if (name == "vaqem_dd") evaluate(name, rep.tuned_dd.config, true);
    if (name == "vaqem_gs") evaluate(name, rep.tuned_gs.config, true);
    if (name == "vaqem_gs_xy") evaluate(name, rep.tuned.config, true);
  }
  rep.timings.ladder_seconds = seconds_since(t0);
  return rep;
}

/// (baseline - variant) / |baseline - E0|; positive means the variant is
/// closer to the ground energy.
inline std::optional<double> improvement_ratio(double baseline, double variant, std::optional<double> e0) {
  if (!e0) return std::nullopt;
  const double gap = std::abs(baseline - *e0);
  if (gap < 1e-15) return std::nullopt;
  return (baseline - variant) / gap;
}

}  // namespace vaqem
