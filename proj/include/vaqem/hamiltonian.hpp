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
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"
#include "vaqem/unitary.hpp"

namespace vaqem {

struct PauliTerm {
  double coeff = 0.0;
  std::string pauli;  // character k acts on qubit k

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

/// Real-weighted sum of Pauli strings. Terms keep first-appearance order.
struct PauliHamiltonian {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  friend bool operator==(const PauliHamiltonian&, const PauliHamiltonian&) = default;
};

inline constexpr double kDropThreshold = 1e-12;

inline bool is_pauli_string(std::string_view s) {
  return !s.empty() && s.find_first_not_of("IXYZ") == std::string_view::npos;
}

/// Merges duplicate strings and drops coefficients below 1e-12 in magnitude.
/// Dropped terms are reported through `dropped` when given.
inline PauliHamiltonian canonicalize(const PauliHamiltonian& h, std::vector<PauliTerm>* dropped = nullptr) {
  PauliHamiltonian out{h.n_qubits, {}};
  for (const auto& t : h.terms) {
    if (static_cast<int>(t.pauli.size()) != h.n_qubits || !is_pauli_string(t.pauli)) {
      throw ConfigError("Pauli string '" + t.pauli + "' does not fit a " + std::to_string(h.n_qubits) +
                        "-qubit Hamiltonian");
    }
    if (!std::isfinite(t.coeff)) throw ConfigError("non-finite coefficient for '" + t.pauli + "'");
    auto it = std::find_if(out.terms.begin(), out.terms.end(), [&](const PauliTerm& o) { return o.pauli == t.pauli; });
    if (it == out.terms.end()) {
      out.terms.push_back(t);
    } else {
      it->coeff += t.coeff;
    }
  }
  std::vector<PauliTerm> kept;
  for (auto& t : out.terms) {
    if (std::abs(t.coeff) < kDropThreshold) {
      if (dropped) dropped->push_back(t);
    } else {
      kept.push_back(std::move(t));
    }
  }
  out.terms = std::move(kept);
  return out;
}

/// Open-boundary transverse-field Ising chain: -J sum Z_i Z_{i+1} - g sum X_i.
inline PauliHamiltonian tfim_hamiltonian(int n, double coupling = 1.0, double field = 1.0) {
  if (n < 2) throw ConfigError("TFIM needs at least two sites");
  PauliHamiltonian h{n, {}};
  for (int i = 0; i + 1 < n; ++i) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i + 1)] = 'Z';
    h.terms.push_back({-coupling, s});
  }
  for (int i = 0; i < n; ++i) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(i)] = 'X';
    h.terms.push_back({-field, s});
  }
  return canonicalize(h);
}

struct HamiltonianFile {
  PauliHamiltonian hamiltonian;
  std::vector<std::string> warnings;
};

/// Parses `coefficient pauli_string` lines; `#` starts a comment.
inline HamiltonianFile parse_hamiltonian(const std::string& text) {
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  PauliHamiltonian h;
  while (std::getline(is, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    // typographic minus
    for (std::size_t pos; (pos = raw.find("\xE2\x88\x92")) != std::string::npos;) raw.replace(pos, 3, "-");
    std::istringstream ls(raw);
    std::string coeff_text, pauli, extra;
    if (!(ls >> coeff_text)) continue;
    double coeff = 0;
    try {
      std::size_t used = 0;
      coeff = std::stod(coeff_text, &used);
      if (used != coeff_text.size()) throw std::invalid_argument(coeff_text);
    } catch (const std::exception&) {
      throw ConfigError("Hamiltonian line " + std::to_string(line) + ": bad coefficient '" + coeff_text + "'");
    }
    if (!(ls >> pauli) || !is_pauli_string(pauli) || (ls >> extra)) {
      throw ConfigError("Hamiltonian line " + std::to_string(line) + ": expected 'coefficient PAULI'");
    }
    if (h.n_qubits == 0) {
      h.n_qubits = static_cast<int>(pauli.size());
    } else if (static_cast<int>(pauli.size()) != h.n_qubits) {
      throw ConfigError("Hamiltonian line " + std::to_string(line) + ": string length " +
                        std::to_string(pauli.size()) + " differs from " + std::to_string(h.n_qubits));
    }
    h.terms.push_back({coeff, pauli});
  }
  if (h.n_qubits == 0) throw ConfigError("Hamiltonian file has no terms");
  HamiltonianFile out;
  std::vector<PauliTerm> dropped;
  out.hamiltonian = canonicalize(h, &dropped);
  for (const auto& t : dropped) {
    std::ostringstream os;
    os << "dropped negligible term " << t.pauli << " (coefficient " << t.coeff << ")";
    out.warnings.push_back(os.str());
  }
  return out;
}

inline HamiltonianFile load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Hamiltonian file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hamiltonian(ss.str());
}

/// Dense 2^n x 2^n matrix of a Pauli string (character k on qubit k).
inline Matrix pauli_matrix(std::string_view pauli) {
  const int n = static_cast<int>(pauli.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  Eigen::Index xmask = 0;
  for (int q = 0; q < n; ++q) {
    if (pauli[static_cast<std::size_t>(q)] == 'X' || pauli[static_cast<std::size_t>(q)] == 'Y') {
      xmask |= Eigen::Index{1} << q;
    }
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    Complex phase = 1;
    for (int q = 0; q < n; ++q) {
      const bool bit = (j >> q) & 1;
      const char c = pauli[static_cast<std::size_t>(q)];
      if (c == 'Y') phase *= bit ? Complex(0, -1) : Complex(0, 1);
      if (c == 'Z' && bit) phase = -phase;
    }
    m(j ^ xmask, j) = phase;
  }
  return m;
}

inline Matrix hamiltonian_matrix(const PauliHamiltonian& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : h.terms) m += t.coeff * pauli_matrix(t.pauli);
  return m;
}

struct GroundState {
  double energy = 0.0;
  Vector state;
};

/// Smallest eigenvalue of the dense Hamiltonian, with an eigenvector.
inline GroundState exact_ground_energy(const PauliHamiltonian& h) {
  if (h.n_qubits < 1 || h.n_qubits > 12) throw SimulationError("exact diagonalization supports 1..12 qubits");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian_matrix(h));
  if (es.info() != Eigen::Success) throw SimulationError("eigensolver failed");
  return GroundState{es.eigenvalues()(0), es.eigenvectors().col(0)};
}

enum class Entanglement { Full, Circular };

inline std::string_view entanglement_name(Entanglement e) { return e == Entanglement::Full ? "full" : "circular"; }

/// Hardware-efficient SU2 ansatz: reps blocks of (RY layer, RZ layer, CX
/// entangler) and a closing rotation layer.
struct AnsatzSpec {
  int n_qubits = 4;
  int reps = 2;
  Entanglement entanglement = Entanglement::Circular;

  int num_parameters() const { return n_qubits * 2 * (reps + 1); }
};

inline std::vector<std::pair<int, int>> entangler_pairs(int n, Entanglement e) {
  std::vector<std::pair<int, int>> out;
  if (n < 2) return out;
  if (e == Entanglement::Full) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  } else if (n == 2) {
    out.emplace_back(0, 1);
  } else {
    for (int i = 0; i < n; ++i) out.emplace_back(i, (i + 1) % n);
  }
  return out;
}

/// Parameterised gate list; slots are named theta0, theta1, ... in
/// layer-major, qubit-major order. A measurement closes every qubit.
inline Circuit su2_ansatz(const AnsatzSpec& spec) {
  if (spec.n_qubits < 1 || spec.reps < 1) throw ConfigError("ansatz needs n_qubits >= 1 and reps >= 1");
  Circuit c;
  c.n_qubits = spec.n_qubits;
  int slot = 0;
  auto rotation_layer = [&] {
    for (auto kind : {GateKind::RY, GateKind::RZ}) {
      for (int q = 0; q < spec.n_qubits; ++q) {
        c.gates.push_back(Gate::rotation(kind, q, Angle::parameter(slot)));
        c.parameters.push_back("theta" + std::to_string(slot));
        ++slot;
      }
    }
  };
  for (int r = 0; r < spec.reps; ++r) {
    rotation_layer();
    for (auto [a, b] : entangler_pairs(spec.n_qubits, spec.entanglement)) c.gates.push_back(Gate::cx(a, b));
  }
  rotation_layer();
  for (int q = 0; q < spec.n_qubits; ++q) c.gates.push_back(Gate::measure(q));
  return c;
}

}  // namespace vaqem
