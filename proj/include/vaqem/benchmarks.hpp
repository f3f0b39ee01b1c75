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

#include <cstdint>
#include <string>
#include <vector>

#include "vaqem/circuit.hpp"
#include "vaqem/mitigation.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/simulator.hpp"

namespace vaqem {

inline constexpr Cycles kSpinEchoDelay = 800;
inline constexpr Cycles kDDSweepDelay = 200;

/// H, idle, X, H, MEASURE on one qubit. The X closes the idle window.
inline Circuit spin_echo_circuit(Cycles delay = kSpinEchoDelay) {
  Circuit c;
  c.n_qubits = 1;
  c.gates = {Gate::single(GateKind::H, 0), Gate::delay_for(0, delay), Gate::single(GateKind::X, 0),
             Gate::single(GateKind::H, 0), Gate::measure(0)};
  return c;
}

/// H, idle, H, MEASURE on one qubit; the idle window is the DD target.
inline Circuit dd_sweep_circuit(Cycles delay = kDDSweepDelay) {
  Circuit c;
  c.n_qubits = 1;
  c.gates = {Gate::single(GateKind::H, 0), Gate::delay_for(0, delay), Gate::single(GateKind::H, 0),
             Gate::measure(0)};
  return c;
}

struct SweepSample {
  double x = 0.0;  // gate fraction or round count
  double fidelity = 0.0;
};

struct SweepCurve {
  IdleWindow window;
  std::vector<SweepSample> samples;
  std::size_t argmax = 0;  // first maximum
};

inline CountsDistribution ideal_distribution(const TimedCircuit& tc) {
  const auto ideal = NoiseModel::ideal();
  return measure_distribution(evolve(tc, {}, ideal), ideal);
}

namespace detail {

inline std::size_t first_max(const std::vector<SweepSample>& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].fidelity > s[best].fidelity) best = i;
  }
  return best;
}

inline IdleWindow single_window(const TimedCircuit& tc) {
  const auto ws = extract_idle_windows(tc, 1);
  if (ws.size() != 1) throw CircuitError("benchmark circuit must have exactly one idle window");
  return ws.front();
}

inline TimedCircuit schedule_benchmark(const Circuit& c, const NoiseModel& noise) {
  noise.validate(c.n_qubits);
  return schedule_alap(c, noise.durations);
}

}  // namespace detail

/// Hellinger fidelity against the ideal outcome as the closing X moves
/// through the window at `positions` evenly spaced fractions.
inline SweepCurve spin_echo_sweep(const NoiseModel& noise, int positions, std::uint64_t seed = 1,
                                  Cycles delay = kSpinEchoDelay) {
  if (positions < 2) throw ConfigError("spin-echo sweep needs at least 2 positions");
  if (delay < 1) throw ConfigError("spin-echo delay must be at least one cycle");
  const auto tc = detail::schedule_benchmark(spin_echo_circuit(delay), noise);
  SweepCurve curve;
  curve.window = detail::single_window(tc);
  const auto ideal = ideal_distribution(tc);
  for (int i = 0; i < positions; ++i) {
    const double f = i == positions - 1 ? 1.0 : static_cast<double>(i) / (positions - 1);
    const auto moved = shift_boundary_gate(tc, curve.window, f);
    const auto dist = measure_distribution(evolve(moved, {}, noise, EvolveOptions{seed, 0}), noise);
    curve.samples.push_back({f, hellinger_fidelity(dist, ideal)});
  }
  curve.argmax = detail::first_max(curve.samples);
  return curve;
}

/// Hellinger fidelity against the ideal outcome for 0..max rounds of `kind`
/// spread over the window.
inline SweepCurve dd_sweep(const NoiseModel& noise, DDKind kind, std::uint64_t seed = 1, Cycles delay = kDDSweepDelay) {
  if (delay < 1) throw ConfigError("DD sweep delay must be at least one cycle");
  const auto tc = detail::schedule_benchmark(dd_sweep_circuit(delay), noise);
  SweepCurve curve;
  curve.window = detail::single_window(tc);
  const auto ideal = ideal_distribution(tc);
  const int max_r = max_rounds(curve.window, kind, tc.durations);
  for (int r = 0; r <= max_r; ++r) {
    const auto c = r == 0 ? tc : insert_dd(tc, curve.window, kind, r);
    const auto dist = measure_distribution(evolve(c, {}, noise, EvolveOptions{seed, 0}), noise);
    curve.samples.push_back({static_cast<double>(r), hellinger_fidelity(dist, ideal)});
  }
  curve.argmax = detail::first_max(curve.samples);
  return curve;
}

}  // namespace vaqem
