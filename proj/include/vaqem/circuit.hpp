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
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vaqem/common.hpp"

namespace vaqem {

enum class GateKind { I, X, Y, Z, H, RX, RY, RZ, CX, DELAY, MEASURE };

inline std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::I: return "id";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::H: return "h";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::DELAY: return "delay";
    case GateKind::MEASURE: return "measure";
  }
  return "?";
}

inline bool is_rotation(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

/// Single-qubit unitary gate that is not a measurement or delay.
inline bool is_single_qubit_unitary(GateKind k) {
  return k != GateKind::CX && k != GateKind::DELAY && k != GateKind::MEASURE;
}

inline std::size_t gate_arity(GateKind k) { return k == GateKind::CX ? 2 : 1; }

/// Rotation angle: either a literal value or a reference to a parameter slot.
struct Angle {
  double value = 0.0;
  int slot = -1;

  static Angle literal(double v) { return Angle{v, -1}; }
  static Angle parameter(int s) { return Angle{0.0, s}; }

  bool symbolic() const { return slot >= 0; }

  double resolve(std::span<const double> params) const {
    if (!symbolic()) return value;
    if (static_cast<std::size_t>(slot) >= params.size()) {
      throw CircuitError("parameter slot " + std::to_string(slot) + " is unbound");
    }
    return params[static_cast<std::size_t>(slot)];
  }

  friend bool operator==(const Angle&, const Angle&) = default;
};

/// Unscheduled gate application.
struct Gate {
  GateKind kind = GateKind::I;
  std::vector<int> qubits;
  Angle angle;
  Cycles delay = 0;  // DELAY only

  static Gate single(GateKind k, int q) { return Gate{k, {q}, {}, 0}; }
  static Gate rotation(GateKind k, int q, Angle a) { return Gate{k, {q}, a, 0}; }
  static Gate cx(int control, int target) { return Gate{GateKind::CX, {control, target}, {}, 0}; }
  static Gate delay_for(int q, Cycles d) { return Gate{GateKind::DELAY, {q}, {}, d}; }
  static Gate measure(int q) { return Gate{GateKind::MEASURE, {q}, {}, 0}; }

  bool acts_on(int q) const { return std::find(qubits.begin(), qubits.end(), q) != qubits.end(); }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Unscheduled, dependency-ordered circuit with named parameter slots.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::vector<std::string> parameters;  // slot order

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Gate durations in device cycles. One cycle is the identity-gate time.
struct DurationTable {
  Cycles single_qubit = 1;
  Cycles cx = 10;
  Cycles measure = 100;
  double cycle_seconds = 35.56e-9;

  Cycles of(const Gate& g) const {
    switch (g.kind) {
      case GateKind::CX: return cx;
      case GateKind::MEASURE: return measure;
      case GateKind::DELAY: return g.delay;
      default: return single_qubit;
    }
  }

  friend bool operator==(const DurationTable&, const DurationTable&) = default;
};

struct TimedGate {
  Gate gate;
  Cycles start = 0;
  Cycles duration = 0;

  Cycles end() const { return start + duration; }

  friend bool operator==(const TimedGate&, const TimedGate&) = default;
};

/// A scheduled circuit. Gates are kept sorted by (start, first qubit).
/// Delays are not stored: idle time is the gap between gates.
struct TimedCircuit {
  int n_qubits = 0;
  std::vector<TimedGate> gates;
  std::vector<std::string> parameters;
  DurationTable durations;

  Cycles length() const {
    Cycles t = 0;
    for (const auto& g : gates) t = std::max(t, g.end());
    return t;
  }

  /// Indices of the gates acting on qubit `q`, in time order.
  std::vector<std::size_t> timeline(int q) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      if (gates[i].gate.acts_on(q)) out.push_back(i);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](std::size_t a, std::size_t b) { return gates[a].start < gates[b].start; });
    return out;
  }

  friend bool operator==(const TimedCircuit&, const TimedCircuit&) = default;
};

/// Per-qubit slack between two consecutive operations.
struct IdleWindow {
  int qubit = 0;
  Cycles start = 0;
  Cycles end = 0;
  std::size_t preceding = 0;  // index into TimedCircuit::gates
  std::size_t following = 0;

  Cycles length() const { return end - start; }

  friend bool operator==(const IdleWindow&, const IdleWindow&) = default;
};

namespace detail {

inline void sort_gates(std::vector<TimedGate>& gates) {
  std::stable_sort(gates.begin(), gates.end(), [](const TimedGate& a, const TimedGate& b) {
    return std::tie(a.start, a.gate.qubits.front()) < std::tie(b.start, b.gate.qubits.front());
  });
}

inline void check_gate_shape(const Gate& g, int n_qubits, std::size_t index) {
  const auto where = " (gate " + std::to_string(index) + ", " + std::string(gate_name(g.kind)) + ")";
  if (g.qubits.size() != gate_arity(g.kind)) throw CircuitError("wrong qubit count" + where);
  for (int q : g.qubits) {
    if (q < 0 || q >= n_qubits) {
      throw CircuitError("qubit " + std::to_string(q) + " out of range for " +
                         std::to_string(n_qubits) + "-qubit circuit" + where);
    }
  }
  if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1]) throw CircuitError("repeated qubit" + where);
  if (g.kind == GateKind::DELAY && g.delay < 0) throw CircuitError("negative delay" + where);
  if (is_rotation(g.kind) && !g.angle.symbolic() && !std::isfinite(g.angle.value)) {
    throw CircuitError("non-finite angle" + where);
  }
}

}  // namespace detail

/// Throws CircuitError if `tc` breaks a TimedCircuit invariant: overlapping
/// gates on a qubit, gates after a measurement, or durations that disagree
/// with the circuit's duration table.
inline void validate(const TimedCircuit& tc) {
  for (std::size_t i = 0; i < tc.gates.size(); ++i) {
    const auto& tg = tc.gates[i];
    detail::check_gate_shape(tg.gate, tc.n_qubits, i);
    if (tg.gate.kind == GateKind::DELAY) throw CircuitError("scheduled circuits carry no DELAY gates");
    if (tg.start < 0) throw CircuitError("negative start time (gate " + std::to_string(i) + ")");
    if (tg.duration != tc.durations.of(tg.gate)) {
      throw CircuitError("duration mismatch (gate " + std::to_string(i) + ")");
    }
  }
  for (int q = 0; q < tc.n_qubits; ++q) {
    const auto line = tc.timeline(q);
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      const auto& a = tc.gates[line[k]];
      const auto& b = tc.gates[line[k + 1]];
      if (a.end() > b.start) {
        throw CircuitError("gates " + std::to_string(line[k]) + " and " + std::to_string(line[k + 1]) +
                           " overlap on qubit " + std::to_string(q));
      }
      if (a.gate.kind == GateKind::MEASURE) {
        throw CircuitError("operation after measurement on qubit " + std::to_string(q));
      }
    }
  }
}

/// As-late-as-possible schedule of a dependency-ordered gate list. The total
/// duration is the critical path; every gate is then pushed as late as its
/// successors allow, so measurements end together at the circuit end.
/// DELAY gates occupy time during scheduling and are dropped afterwards; a
/// DELAY with no later operation on its qubit is ignored.
inline TimedCircuit schedule_alap(std::span<const Gate> gates, int n_qubits,
                                  std::vector<std::string> parameters = {},
                                  const DurationTable& durations = {}) {
  if (n_qubits <= 0) throw CircuitError("circuit needs at least one qubit");
  std::vector<bool> measured(static_cast<std::size_t>(n_qubits), false);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    detail::check_gate_shape(gates[i], n_qubits, i);
    for (int q : gates[i].qubits) {
      if (measured[static_cast<std::size_t>(q)]) {
        throw CircuitError("operation after measurement on qubit " + std::to_string(q));
      }
      if (gates[i].kind == GateKind::MEASURE) measured[static_cast<std::size_t>(q)] = true;
    }
  }

  // trailing DELAYs have no successor to hold apart, so they carry no time
  std::vector<bool> keep(gates.size(), true);
  {
    std::vector<bool> seen(static_cast<std::size_t>(n_qubits), false);
    for (std::size_t i = gates.size(); i-- > 0;) {
      const bool delay = gates[i].kind == GateKind::DELAY;
      bool later = false;
      for (int q : gates[i].qubits) later = later || seen[static_cast<std::size_t>(q)];
      if (delay && !later) keep[i] = false;
      if (!delay) {
        for (int q : gates[i].qubits) seen[static_cast<std::size_t>(q)] = true;
      }
    }
  }

  std::vector<Cycles> avail(static_cast<std::size_t>(n_qubits), 0);
  Cycles total = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!keep[i]) continue;
    const auto& g = gates[i];
    Cycles s = 0;
    for (int q : g.qubits) s = std::max(s, avail[static_cast<std::size_t>(q)]);
    const Cycles e = s + durations.of(g);
    for (int q : g.qubits) avail[static_cast<std::size_t>(q)] = e;
    total = std::max(total, e);
  }

  std::vector<Cycles> latest(static_cast<std::size_t>(n_qubits), total);
  std::vector<Cycles> starts(gates.size(), 0);
  for (std::size_t i = gates.size(); i-- > 0;) {
    if (!keep[i]) continue;
    Cycles e = total;
    for (int q : gates[i].qubits) e = std::min(e, latest[static_cast<std::size_t>(q)]);
    starts[i] = e - durations.of(gates[i]);
    for (int q : gates[i].qubits) latest[static_cast<std::size_t>(q)] = starts[i];
  }

  TimedCircuit tc;
  tc.n_qubits = n_qubits;
  tc.parameters = std::move(parameters);
  tc.durations = durations;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i].kind == GateKind::DELAY) continue;
    tc.gates.push_back(TimedGate{gates[i], starts[i], durations.of(gates[i])});
  }
  detail::sort_gates(tc.gates);
  return tc;
}

inline TimedCircuit schedule_alap(const Circuit& c, const DurationTable& durations = {}) {
  return schedule_alap(c.gates, c.n_qubits, c.parameters, durations);
}

/// Dependency-ordered gate list equivalent to `tc`: gaps before and between a
/// qubit's operations come back as explicit DELAYs, so rescheduling the list
/// reproduces the same start times.
inline std::vector<Gate> to_gate_list(const TimedCircuit& tc) {
  struct Item {
    Cycles start;
    int qubit;
    int order;
    Gate gate;
  };
  std::vector<Item> items;
  std::vector<Cycles> last_end(static_cast<std::size_t>(tc.n_qubits), -1);
  int order = 0;
  for (const auto& tg : tc.gates) {
    for (int q : tg.gate.qubits) {
      const Cycles prev = std::max<Cycles>(last_end[static_cast<std::size_t>(q)], 0);
      if (tg.start > prev) {
        items.push_back(Item{prev, q, order++, Gate::delay_for(q, tg.start - prev)});
      }
      last_end[static_cast<std::size_t>(q)] = tg.end();
    }
    items.push_back(Item{tg.start, tg.gate.qubits.front(), order++, tg.gate});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.start, a.order) < std::tie(b.start, b.order);
  });
  std::vector<Gate> out;
  out.reserve(items.size());
  for (auto& it : items) out.push_back(std::move(it.gate));
  return out;
}

/// Every maximal gap of at least `min_len` cycles between two consecutive
/// operations on the same qubit, sorted by (qubit, start). Time before a
/// qubit's first operation is never a window: the qubit still holds |0>.
inline std::vector<IdleWindow> extract_idle_windows(const TimedCircuit& tc, Cycles min_len = 1) {
  std::vector<IdleWindow> out;
  const Cycles floor_len = std::max<Cycles>(min_len, 1);
  for (int q = 0; q < tc.n_qubits; ++q) {
    const auto line = tc.timeline(q);
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      const Cycles s = tc.gates[line[k]].end();
      const Cycles e = tc.gates[line[k + 1]].start;
      if (e - s >= floor_len) out.push_back(IdleWindow{q, s, e, line[k], line[k + 1]});
    }
  }
  return out;
}

/// Index of the gate on `qubit` that starts exactly at `start`.
inline std::optional<std::size_t> find_gate(const TimedCircuit& tc, int qubit, Cycles start) {
  for (std::size_t i = 0; i < tc.gates.size(); ++i) {
    if (tc.gates[i].start == start && tc.gates[i].gate.acts_on(qubit)) return i;
  }
  return std::nullopt;
}

struct Insertion {
  GateKind kind = GateKind::X;
  Cycles offset = 0;  // cycles after the window start
};

/// Adds fixed single-qubit gates inside window `w`. Every inserted gate must
/// lie within [w.start, w.end) and must not touch any other gate on the qubit.
inline TimedCircuit insert_in_window(const TimedCircuit& tc, const IdleWindow& w,
                                     std::span<const Insertion> insertions) {
  TimedCircuit out = tc;
  if (insertions.empty()) return out;
  if (w.qubit < 0 || w.qubit >= tc.n_qubits) throw CircuitError("window qubit out of range");

  std::vector<std::pair<Cycles, Cycles>> busy;
  for (std::size_t i : tc.timeline(w.qubit)) busy.emplace_back(tc.gates[i].start, tc.gates[i].end());

  for (std::size_t k = 0; k < insertions.size(); ++k) {
    const auto& ins = insertions[k];
    const auto tag = "inserted gate " + std::to_string(k) + " (" + std::string(gate_name(ins.kind)) +
                     " at offset " + std::to_string(ins.offset) + ")";
    if (!is_single_qubit_unitary(ins.kind) || is_rotation(ins.kind)) {
      throw CircuitError(tag + ": only fixed single-qubit gates can be inserted");
    }
    const Gate g = Gate::single(ins.kind, w.qubit);
    const Cycles s = w.start + ins.offset;
    const Cycles e = s + tc.durations.of(g);
    if (ins.offset < 0 || e > w.end) throw CircuitError(tag + " falls outside the window");
    for (const auto& [bs, be] : busy) {
      if (s < be && bs < e) throw CircuitError(tag + " overlaps another gate");
    }
    busy.emplace_back(s, e);
    out.gates.push_back(TimedGate{g, s, e - s});
  }
  detail::sort_gates(out.gates);
  return out;
}

/// Moves the single-qubit gate that closes window `w` so that it starts
/// round(f * len) cycles into the window. f = 1 leaves it where ALAP put it.
inline TimedCircuit shift_boundary_gate(const TimedCircuit& tc, const IdleWindow& w, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw CircuitError("gate fraction must lie in [0, 1]");
  const auto idx = find_gate(tc, w.qubit, w.end);
  if (!idx) throw CircuitError("window is not closed by a gate on its qubit");
  const auto& g = tc.gates[*idx].gate;
  if (!is_single_qubit_unitary(g.kind)) {
    throw CircuitError("no movable gate: window on qubit " + std::to_string(w.qubit) + " [" +
                       std::to_string(w.start) + ", " + std::to_string(w.end) + ") ends in " +
                       std::string(gate_name(g.kind)));
  }
  TimedCircuit out = tc;
  out.gates[*idx].start = w.start + std::llround(f * static_cast<double>(w.length()));
  detail::sort_gates(out.gates);
  return out;
}

/// True when window `w` is closed by a gate that shift_boundary_gate may move.
inline bool has_movable_gate(const TimedCircuit& tc, const IdleWindow& w) {
  const auto idx = find_gate(tc, w.qubit, w.end);
  return idx && is_single_qubit_unitary(tc.gates[*idx].gate.kind);
}

}  // namespace vaqem
