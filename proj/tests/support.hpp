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

// Shared generators and brute-force oracles for the test suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vaqem.hpp"

namespace vaqem::testing {

/// Random dependency-ordered circuit over the full gate vocabulary. When
/// `measure` is set every qubit ends with a measurement.
inline Circuit random_circuit(int n, int n_gates, std::mt19937_64& rng, bool measure = false, bool delays = true,
                              bool symbolic = false) {
  Circuit c;
  c.n_qubits = n;
  std::uniform_int_distribution<int> qd(0, n - 1);
  std::uniform_int_distribution<int> kd(0, delays ? 9 : 8);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_int_distribution<int> dd(0, 25);
  for (int i = 0; i < n_gates; ++i) {
    const auto k = static_cast<GateKind>(kd(rng));
    const int q = qd(rng);
    if (k == GateKind::CX) {
      if (n < 2) {
        c.gates.push_back(Gate::single(GateKind::X, q));
        continue;
      }
      int t = qd(rng);
      while (t == q) t = qd(rng);
      c.gates.push_back(Gate::cx(q, t));
    } else if (k == GateKind::DELAY) {
      c.gates.push_back(Gate::delay_for(q, dd(rng)));
    } else if (is_rotation(k)) {
      if (symbolic && rng() % 2 == 0) {
        const int slot = static_cast<int>(c.parameters.size());
        c.parameters.push_back("t" + std::to_string(slot));
        c.gates.push_back(Gate::rotation(k, q, Angle::parameter(slot)));
      } else {
        c.gates.push_back(Gate::rotation(k, q, Angle::literal(ang(rng))));
      }
    } else {
      c.gates.push_back(Gate::single(k, q));
    }
  }
  if (measure) {
    for (int q = 0; q < n; ++q) c.gates.push_back(Gate::measure(q));
  }
  return c;
}

/// ALAP start times by fixpoint relaxation: start every gate at T - d and
/// pull it earlier until it ends before each later gate on a shared qubit
/// starts. T is the longest dependency chain, found the same way forwards.
inline std::vector<Cycles> relaxation_alap(const std::vector<Gate>& gates, const DurationTable& table, Cycles* total) {
  const std::size_t m = gates.size();
  const auto shares = [&](std::size_t i, std::size_t j) {
    for (int q : gates[i].qubits) {
      if (gates[j].acts_on(q)) return true;
    }
    return false;
  };
  // a DELAY followed by no real gate on its qubit counts as zero length
  std::vector<Cycles> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = table.of(gates[i]);
    if (gates[i].kind != GateKind::DELAY) continue;
    bool later = false;
    for (std::size_t j = i + 1; j < m; ++j) later = later || (gates[j].kind != GateKind::DELAY && shares(i, j));
    if (!later) d[i] = 0;
  }
  struct {
    const std::vector<Cycles>& d;
    const std::vector<Gate>& g;
    Cycles of(const Gate& x) const { return d[static_cast<std::size_t>(&x - g.data())]; }
  } dur{d, gates};
  std::vector<Cycles> asap(m, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (shares(i, j) && asap[j] < asap[i] + dur.of(gates[i])) {
          asap[j] = asap[i] + dur.of(gates[i]);
          changed = true;
        }
  }
  Cycles t = 0;
  for (std::size_t i = 0; i < m; ++i) t = std::max(t, asap[i] + dur.of(gates[i]));
  std::vector<Cycles> alap(m);
  for (std::size_t i = 0; i < m; ++i) alap[i] = t - dur.of(gates[i]);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (shares(i, j) && alap[i] > alap[j] - dur.of(gates[i])) {
          alap[i] = alap[j] - dur.of(gates[i]);
          changed = true;
        }
  }
  if (total) *total = t;
  return alap;
}

/// Windows by scanning a per-cycle occupancy grid.
inline std::vector<IdleWindow> scan_windows(const TimedCircuit& tc, Cycles min_len) {
  std::vector<IdleWindow> out;
  const Cycles len = tc.length();
  for (int q = 0; q < tc.n_qubits; ++q) {
    std::vector<char> busy(static_cast<std::size_t>(len), 0);
    for (const auto& g : tc.gates) {
      if (!g.gate.acts_on(q)) continue;
      for (Cycles t = g.start; t < g.end(); ++t) busy[static_cast<std::size_t>(t)] = 1;
    }
    Cycles first = -1, last = -1;
    for (Cycles t = 0; t < len; ++t) {
      if (busy[static_cast<std::size_t>(t)]) {
        if (first < 0) first = t;
        last = t;
      }
    }
    if (first < 0) continue;
    Cycles t = first;
    while (t <= last) {
      if (busy[static_cast<std::size_t>(t)]) {
        ++t;
        continue;
      }
      Cycles e = t;
      while (!busy[static_cast<std::size_t>(e)]) ++e;
      if (e - t >= min_len) out.push_back(IdleWindow{q, t, e, {}, {}});
      t = e;
    }
  }
  return out;
}

inline std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

/// Random but valid noise model with every channel switched on.
inline NoiseModel random_noise(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NoiseModel m;
  m.qubits.clear();
  for (int q = 0; q < n; ++q) {
    QubitNoise qn;
    qn.t1 = 20e-6 + 180e-6 * u(rng);
    qn.t2 = qn.t1 * (0.2 + 1.8 * u(rng));
    const int mode = static_cast<int>(rng() % 3);
    qn.detuning = static_cast<DetuningMode>(mode);
    qn.omega = 2 * kPi * 20e3 * (u(rng) - 0.5);
    qn.sigma = 2 * kPi * 10e3 * u(rng);
    qn.p01 = 0.05 * u(rng);
    qn.p10 = 0.05 * u(rng);
    m.qubits.push_back(qn);
  }
  m.p_1q = 0.01 * u(rng);
  m.p_cx = 0.05 * u(rng);
  m.realizations = 4;
  return m;
}

/// Random valid mitigation config over `windows`: every window gets a kind,
/// a gate fraction (when its closing gate can move) and a round count that
/// fits.
inline MitigationConfig random_config(const TimedCircuit& tc, const std::vector<IdleWindow>& windows,
                                      std::mt19937_64& rng) {
  MitigationConfig cfg;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DDKind kinds[] = {DDKind::XX, DDKind::YY, DDKind::XY4};
  for (const auto& w : windows) {
    WindowSetting s;
    s.kind = kinds[rng() % 3];
    if (has_movable_gate(tc, w) && rng() % 2 == 0) s.fraction = std::floor(u(rng) * 8) / 8;
    const int max_r = max_rounds_with_shift(w, s.fraction, s.kind, tc.durations);
    s.rounds = max_r == 0 ? 0 : static_cast<int>(rng() % static_cast<std::uint64_t>(max_r + 1));
    cfg.windows.push_back(WindowConfig{w, s});
  }
  return cfg;
}

/// SPSA settings used for noiseless end-to-end convergence runs: wider first
/// steps, gradient averaging and step blocking.
inline SpsaSettings converging_spsa(int iters = 500) {
  SpsaSettings s;
  s.c = 0.05;
  s.A = 50;
  s.target_step = 0.4;
  s.resamplings = 4;
  s.blocking = true;
  s.max_iters = iters;
  return s;
}

}  // namespace vaqem::testing
