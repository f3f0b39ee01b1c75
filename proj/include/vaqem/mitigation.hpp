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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/simulator.hpp"

namespace vaqem {

enum class DDKind { XX, YY, XY4 };

inline std::string_view dd_name(DDKind k) {
  switch (k) {
    case DDKind::XX: return "XX";
    case DDKind::YY: return "YY";
    case DDKind::XY4: return "XY4";
  }
  return "?";
}

inline std::optional<DDKind> dd_from_name(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (s == "XX") return DDKind::XX;
  if (s == "YY") return DDKind::YY;
  if (s == "XY4" || s == "XY") return DDKind::XY4;
  return std::nullopt;
}

/// Pulses of one round of a sequence.
inline std::vector<GateKind> dd_pulses(DDKind k) {
  switch (k) {
    case DDKind::XX: return {GateKind::X, GateKind::X};
    case DDKind::YY: return {GateKind::Y, GateKind::Y};
    case DDKind::XY4: return {GateKind::X, GateKind::Y, GateKind::X, GateKind::Y};
  }
  return {};
}

/// Rounds of `kind` that fit in `length` cycles.
inline int max_rounds(Cycles length, DDKind kind, const DurationTable& d = {}) {
  const Cycles per_round = static_cast<Cycles>(dd_pulses(kind).size()) * d.single_qubit;
  return length <= 0 ? 0 : static_cast<int>(length / per_round);
}

inline int max_rounds(const IdleWindow& w, DDKind kind, const DurationTable& d = {}) {
  return max_rounds(w.length(), kind, d);
}

/// Start offsets of `pulses` equally spaced pulses in a region of `length`
/// cycles: all pulses+1 gaps equal to (length - pulses*pulse)/(pulses+1),
/// each ideal start rounded half-up to a whole cycle.
inline std::vector<Cycles> dd_offsets(Cycles length, int pulses, Cycles pulse) {
  std::vector<Cycles> out;
  if (pulses <= 0) return out;
  const Cycles free = length - pulses * pulse;
  if (free < 0) throw CircuitError("DD pulses do not fit the region");
  const Cycles slots = pulses + 1;
  for (Cycles k = 0; k < pulses; ++k) {
    out.push_back(k * pulse + (2 * (k + 1) * free + slots) / (2 * slots));
  }
  return out;
}

/// Periodic DD: `rounds` copies of the sequence spread evenly over [start, end) on `qubit`.
inline TimedCircuit insert_dd_region(const TimedCircuit& tc, int qubit, Cycles start, Cycles end, DDKind kind,
                                     int rounds) {
  const IdleWindow region{qubit, start, end, 0, 0};
  if (rounds < 0 || rounds > max_rounds(region, kind, tc.durations)) {
    throw CircuitError("DD rounds " + std::to_string(rounds) + " out of range for region [" + std::to_string(start) +
                       ", " + std::to_string(end) + ") on qubit " + std::to_string(qubit));
  }
  if (rounds == 0) return tc;
  const auto round_pulses = dd_pulses(kind);
  const int m = rounds * static_cast<int>(round_pulses.size());
  const auto offsets = dd_offsets(end - start, m, tc.durations.single_qubit);
  std::vector<Insertion> ins;
  for (int k = 0; k < m; ++k) {
    ins.push_back(Insertion{round_pulses[static_cast<std::size_t>(k) % round_pulses.size()],
                            offsets[static_cast<std::size_t>(k)]});
  }
  return insert_in_window(tc, region, ins);
}

inline TimedCircuit insert_dd(const TimedCircuit& tc, const IdleWindow& w, DDKind kind, int rounds) {
  if (rounds < 1) throw CircuitError("insert_dd needs at least one round");
  return insert_dd_region(tc, w.qubit, w.start, w.end, kind, rounds);
}

/// Tuned mitigation for one idle window. rounds == 0 means no DD;
/// fraction == 1 keeps the ALAP position of the closing gate.
struct WindowSetting {
  DDKind kind = DDKind::XY4;
  int rounds = 0;
  double fraction = 1.0;

  bool is_baseline() const { return rounds == 0 && fraction == 1.0; }

  friend bool operator==(const WindowSetting&, const WindowSetting&) = default;
};

struct WindowConfig {
  IdleWindow window;
  WindowSetting setting;

  friend bool operator==(const WindowConfig&, const WindowConfig&) = default;
};

struct MitigationConfig {
  std::vector<WindowConfig> windows;

  friend bool operator==(const MitigationConfig&, const MitigationConfig&) = default;
};

/// Cycle where the closing gate starts after shifting by `fraction`.
inline Cycles shifted_start(const IdleWindow& w, double fraction) {
  return w.start + std::llround(fraction * static_cast<double>(w.length()));
}

/// Lengths of the slack before and after the closing gate once it moved.
inline std::pair<Cycles, Cycles> residual_lengths(const IdleWindow& w, double fraction) {
  const Cycles pre = shifted_start(w, fraction) - w.start;
  return {pre, w.length() - pre};
}

/// DD rounds split between the two residual intervals in proportion to
/// their lengths, or nullopt when `rounds` cannot be placed.
inline std::optional<std::pair<int, int>> split_rounds(const IdleWindow& w, double fraction, DDKind kind, int rounds,
                                                       const DurationTable& d = {}) {
  const auto [pre, post] = residual_lengths(w, fraction);
  const int max_pre = max_rounds(pre, kind, d);
  const int max_post = max_rounds(post, kind, d);
  if (rounds > max_pre + max_post) return std::nullopt;
  int r_pre = w.length() > 0 ? static_cast<int>(std::llround(static_cast<double>(rounds) * static_cast<double>(pre) /
                                                            static_cast<double>(w.length())))
                             : 0;
  r_pre = std::min(r_pre, max_pre);
  int r_post = rounds - r_pre;
  if (r_post > max_post) {
    r_post = max_post;
    r_pre = rounds - r_post;
  }
  return std::make_pair(r_pre, r_post);
}

/// Largest round count placeable in `w` for a given gate fraction.
inline int max_rounds_with_shift(const IdleWindow& w, double fraction, DDKind kind, const DurationTable& d = {}) {
  if (fraction == 1.0) return max_rounds(w, kind, d);
  const auto [pre, post] = residual_lengths(w, fraction);
  return max_rounds(pre, kind, d) + max_rounds(post, kind, d);
}

/// Applies one window's setting: gate shift first, then DD over the slack
/// left on each side of the moved gate.
inline TimedCircuit apply_window(const TimedCircuit& tc, const IdleWindow& w, const WindowSetting& s) {
  const auto tag = [&] {
    return "window on qubit " + std::to_string(w.qubit) + " [" + std::to_string(w.start) + ", " +
           std::to_string(w.end) + ")";
  };
  if (!(s.fraction >= 0.0 && s.fraction <= 1.0)) throw CircuitError(tag() + ": gate fraction outside [0, 1]");
  if (s.rounds < 0) throw CircuitError(tag() + ": negative DD rounds");
  TimedCircuit out = tc;
  if (s.fraction == 1.0) {
    if (s.rounds > 0) {
      if (s.rounds > max_rounds(w, s.kind, tc.durations)) throw CircuitError(tag() + ": too many DD rounds");
      out = insert_dd(out, w, s.kind, s.rounds);
    }
    return out;
  }
  if (!has_movable_gate(tc, w)) throw CircuitError(tag() + ": no movable gate for a gate shift");
  const auto idx = find_gate(tc, w.qubit, w.end);
  const Cycles gate_len = tc.gates[*idx].duration;
  out = shift_boundary_gate(out, w, s.fraction);
  if (s.rounds == 0) return out;
  const auto split = split_rounds(w, s.fraction, s.kind, s.rounds, tc.durations);
  if (!split) throw CircuitError(tag() + ": DD rounds conflict with the shifted gate");
  const Cycles moved = shifted_start(w, s.fraction);
  out = insert_dd_region(out, w.qubit, w.start, moved, s.kind, split->first);
  out = insert_dd_region(out, w.qubit, moved + gate_len, w.end + gate_len, s.kind, split->second);
  return out;
}

/// Applies every window entry of `config` to `tc`. Entries must name windows
/// from `windows`, which must be the idle windows of `tc`.
inline TimedCircuit apply_config(const TimedCircuit& tc, std::span<const IdleWindow> windows,
                                 const MitigationConfig& config) {
  TimedCircuit out = tc;
  for (const auto& entry : config.windows) {
    const auto& w = entry.window;
    const bool known = std::any_of(windows.begin(), windows.end(), [&](const IdleWindow& o) {
      return o.qubit == w.qubit && o.start == w.start && o.end == w.end;
    });
    if (!known) {
      throw CircuitError("config names an unknown window on qubit " + std::to_string(w.qubit) + " [" +
                         std::to_string(w.start) + ", " + std::to_string(w.end) + ")");
    }
    if (entry.setting.is_baseline()) continue;
    out = apply_window(out, w, entry.setting);
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Measurement error mitigation

struct MemOptions {
  std::uint64_t shots = 0;  // 0: exact distributions
  std::uint64_t seed = 1;
  bool tensored = false;
  bool prep_noise = false;  // also run the preparation through gate and idle noise
};

/// `noise` with everything but readout error removed.
inline NoiseModel readout_only(const NoiseModel& noise, int n_qubits) {
  NoiseModel out = NoiseModel::ideal();
  out.durations = noise.durations;
  out.confusion = noise.confusion;
  out.qubits.clear();
  for (int q = 0; q < n_qubits; ++q) {
    QubitNoise qn = NoiseModel::ideal().qubits.front();
    qn.p01 = noise.qubit(q).p01;
    qn.p10 = noise.qubit(q).p10;
    out.qubits.push_back(qn);
  }
  return out;
}

inline Circuit basis_state_circuit(int n_qubits, std::size_t index) {
  Circuit c;
  c.n_qubits = n_qubits;
  for (int q = 0; q < n_qubits; ++q) {
    if ((index >> q) & 1U) c.gates.push_back(Gate::single(GateKind::X, q));
  }
  for (int q = 0; q < n_qubits; ++q) c.gates.push_back(Gate::measure(q));
  return c;
}

/// Confusion matrix A (A[i][j] = P(read i | prepared j)) estimated from the
/// 2^n basis-state circuits. Preparation is ideal unless `prep_noise` is set.
/// Tensored mode calibrates each qubit alone and returns the Kronecker product.
inline Eigen::MatrixXd mem_calibrate(int n_qubits, const NoiseModel& noise, const MemOptions& opts = {}) {
  if (n_qubits < 1) throw ConfigError("MEM calibration needs at least one qubit");
  if (!opts.tensored && n_qubits > 6) throw ConfigError("full MEM calibration supports at most 6 qubits; use tensored mode");
  std::mt19937_64 rng(opts.seed);
  auto column = [&](int n, std::size_t j, const NoiseModel& full) {
    const NoiseModel nm = opts.prep_noise ? full : readout_only(full, n);
    const auto tc = schedule_alap(basis_state_circuit(n, j), nm.durations);
    const auto rho = evolve(tc, {}, nm, EvolveOptions{opts.seed, 0});
    auto dist = measure_distribution(rho, nm);
    if (opts.shots > 0) dist = sample_counts(dist, opts.shots, rng);
    return dist;
  };
  if (!opts.tensored) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      const auto d = column(n_qubits, j, noise);
      for (std::size_t i = 0; i < dim; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.probs[i];
    }
    return a;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    NoiseModel single = noise;
    single.qubits = {noise.qubit(q)};
    single.confusion.reset();
    Eigen::Matrix2d aq;
    for (std::size_t j = 0; j < 2; ++j) {
      const auto d = column(1, j, single);
      aq(0, static_cast<Eigen::Index>(j)) = d.probs[0];
      aq(1, static_cast<Eigen::Index>(j)) = d.probs[1];
    }
    // qubit q is bit q, so it is the slower-varying factor of the product
    Eigen::MatrixXd next(a.rows() * 2, a.cols() * 2);
    for (Eigen::Index r = 0; r < 2; ++r)
      for (Eigen::Index c = 0; c < 2; ++c) next.block(r * a.rows(), c * a.cols(), a.rows(), a.cols()) = aq(r, c) * a;
    a = std::move(next);
  }
  return a;
}

/// Solves A x = raw, clips negative entries and renormalises. A singular A
/// falls back to a least-squares solution and appends a warning.
inline CountsDistribution mem_correct(const CountsDistribution& raw, const Eigen::MatrixXd& a,
                                      std::vector<std::string>* warnings = nullptr) {
  const auto dim = static_cast<Eigen::Index>(raw.probs.size());
  if (a.rows() != dim || a.cols() != dim) throw Error("confusion matrix does not match distribution size");
  const Eigen::Map<const Eigen::VectorXd> b(raw.probs.data(), dim);
  Eigen::VectorXd x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.isInvertible()) {
    x = lu.solve(b);
  } else {
    if (warnings) warnings->push_back("confusion matrix is singular; using least squares");
    x = a.completeOrthogonalDecomposition().solve(b);
  }
  CountsDistribution out{raw.n_qubits, std::vector<double>(static_cast<std::size_t>(dim)), raw.shots};
  double total = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    out.probs[static_cast<std::size_t>(i)] = std::max(0.0, x(i));
    total += out.probs[static_cast<std::size_t>(i)];
  }
  if (total <= 0) throw Error("MEM correction produced an empty distribution");
  for (auto& p : out.probs) p /= total;
  return out;
}

}  // namespace vaqem
