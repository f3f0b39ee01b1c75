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
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/hamiltonian.hpp"
#include "vaqem/mitigation.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/simulator.hpp"

namespace vaqem {

enum class ObjectiveMode { Exact, Sampled };

struct SimOptions {
  ObjectiveMode mode = ObjectiveMode::Exact;
  std::uint64_t shots = 0;  // sampled mode; 0 means infinite-shot distributions
  bool mem = false;         // sampled mode only
  std::uint64_t seed = 1;
  int realizations = 0;     // 0: noise model default
};

/// Terms that share one measurement basis. `basis[k]` is the measured Pauli
/// on qubit k ('I' when no term in the group touches it).
struct MeasurementGroup {
  std::string basis;
  std::vector<std::size_t> terms;
};

/// Greedy first-fit grouping into qubit-wise commuting sets.
inline std::vector<MeasurementGroup> group_terms(const PauliHamiltonian& h) {
  std::vector<MeasurementGroup> groups;
  for (std::size_t t = 0; t < h.terms.size(); ++t) {
    const auto& p = h.terms[t].pauli;
    bool placed = false;
    for (auto& g : groups) {
      bool fits = true;
      for (std::size_t q = 0; q < p.size() && fits; ++q) {
        fits = p[q] == 'I' || g.basis[q] == 'I' || g.basis[q] == p[q];
      }
      if (!fits) continue;
      for (std::size_t q = 0; q < p.size(); ++q) {
        if (p[q] != 'I') g.basis[q] = p[q];
      }
      g.terms.push_back(t);
      placed = true;
      break;
    }
    if (!placed) groups.push_back(MeasurementGroup{p, {t}});
  }
  return groups;
}

/// Rotations that map the group basis onto Z: X -> H, Y -> RZ(-pi/2) then H.
inline std::vector<Gate> basis_change_gates(const std::string& basis) {
  std::vector<Gate> out;
  for (std::size_t q = 0; q < basis.size(); ++q) {
    const int qi = static_cast<int>(q);
    if (basis[q] == 'X') {
      out.push_back(Gate::single(GateKind::H, qi));
    } else if (basis[q] == 'Y') {
      out.push_back(Gate::rotation(GateKind::RZ, qi, Angle::literal(-kPi / 2)));
      out.push_back(Gate::single(GateKind::H, qi));
    }
  }
  return out;
}

/// The measurement circuit for one group: `tc` with its measurements moved
/// after the basis-change rotations.
inline TimedCircuit with_measurement_basis(const TimedCircuit& tc, const std::string& basis) {
  TimedCircuit out = tc;
  std::erase_if(out.gates, [](const TimedGate& g) { return g.gate.kind == GateKind::MEASURE; });
  const Cycles t0 = out.length();
  std::vector<Cycles> cursor(static_cast<std::size_t>(tc.n_qubits), t0);
  Cycles t_meas = t0;
  for (const auto& g : basis_change_gates(basis)) {
    auto& c = cursor[static_cast<std::size_t>(g.qubits[0])];
    const Cycles d = out.durations.of(g);
    out.gates.push_back(TimedGate{g, c, d});
    c += d;
    t_meas = std::max(t_meas, c);
  }
  for (int q = 0; q < tc.n_qubits; ++q) {
    const Gate m = Gate::measure(q);
    out.gates.push_back(TimedGate{m, t_meas, out.durations.of(m)});
  }
  detail::sort_gates(out.gates);
  return out;
}

/// Ideal (noise-free) basis change applied directly to a state.
inline DensityMatrix rotate_to_basis(DensityMatrix rho, const std::string& basis) {
  for (const auto& g : basis_change_gates(basis)) {
    rho.apply_unitary(mat::single_qubit(g.kind, g.angle.value), g.qubits[0]);
  }
  return rho;
}

/// Expectation of a Pauli string from Z-basis outcomes after the basis change.
inline double parity_expectation(const CountsDistribution& d, const std::string& pauli) {
  std::size_t mask = 0;
  for (std::size_t q = 0; q < pauli.size(); ++q) {
    if (pauli[q] != 'I') mask |= std::size_t{1} << q;
  }
  double e = 0;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    e += (std::popcount(i & mask) % 2 == 0 ? 1.0 : -1.0) * d.probs[i];
  }
  return e;
}

inline double energy(const DensityMatrix& rho, const PauliHamiltonian& h) {
  double e = 0;
  for (const auto& t : h.terms) e += t.coeff * pauli_expectation(rho, t.pauli);
  return e;
}

/// Energy estimate from grouped Z-basis distributions of `rho`. Readout error
/// is applied per group; `mem_matrix` (when given) corrects it.
inline double sampled_energy(const DensityMatrix& rho, const PauliHamiltonian& h, const NoiseModel& noise,
                             const SimOptions& opts, const Eigen::MatrixXd* mem_matrix = nullptr) {
  std::mt19937_64 rng(opts.seed ^ 0x9E3779B97F4A7C15ULL);
  double e = 0;
  for (const auto& g : group_terms(h)) {
    auto dist = measure_distribution(rotate_to_basis(rho, g.basis), noise);
    if (opts.shots > 0) dist = sample_counts(dist, opts.shots, rng);
    if (mem_matrix) dist = mem_correct(dist, *mem_matrix);
    for (auto t : g.terms) e += h.terms[t].coeff * parity_expectation(dist, h.terms[t].pauli);
  }
  return e;
}

/// VQE objective <H> for a scheduled circuit at `params`. Exact mode returns
/// Tr[H rho]; sampled mode estimates each measurement group from outcome
/// distributions.
inline double objective(const TimedCircuit& tc, std::span<const double> params, const PauliHamiltonian& h,
                        const NoiseModel& noise, const SimOptions& opts = {},
                        const Eigen::MatrixXd* mem_matrix = nullptr) {
  if (h.n_qubits != tc.n_qubits) {
    throw SimulationError("Hamiltonian acts on " + std::to_string(h.n_qubits) + " qubits, circuit has " +
                          std::to_string(tc.n_qubits));
  }
  const auto rho = evolve(tc, params, noise, EvolveOptions{opts.seed, opts.realizations});
  if (opts.mode == ObjectiveMode::Exact) return energy(rho, h);
  return sampled_energy(rho, h, noise, opts, opts.mem ? mem_matrix : nullptr);
}

}  // namespace vaqem
