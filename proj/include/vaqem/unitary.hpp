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

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"

namespace vaqem {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace mat {

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 pauli_x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix2 pauli_y() {
  Matrix2 m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Matrix2 pauli_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix2 hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix2 m;
  m << r, r, r, -r;
  return m;
}

inline Matrix2 rx(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  Matrix2 m;
  m << c, Complex(0, -s), Complex(0, -s), c;
  return m;
}

inline Matrix2 ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  Matrix2 m;
  m << c, -s, s, c;
  return m;
}

inline Matrix2 rz(double t) {
  Matrix2 m;
  m << std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2);
  return m;
}

/// Pauli matrix for one of the characters I, X, Y, Z.
inline Matrix2 pauli(char p) {
  switch (p) {
    case 'X': return pauli_x();
    case 'Y': return pauli_y();
    case 'Z': return pauli_z();
    default: return identity();
  }
}

/// 2x2 unitary of a single-qubit gate kind.
inline Matrix2 single_qubit(GateKind k, double theta = 0.0) {
  switch (k) {
    case GateKind::X: return pauli_x();
    case GateKind::Y: return pauli_y();
    case GateKind::Z: return pauli_z();
    case GateKind::H: return hadamard();
    case GateKind::RX: return rx(theta);
    case GateKind::RY: return ry(theta);
    case GateKind::RZ: return rz(theta);
    default: return identity();
  }
}

}  // namespace mat

/// Left-multiplies the 2^n-row matrix `m` by a single-qubit operator on `q`.
/// Qubit q is bit q of the basis index.
inline void apply_left(Matrix& m, const Matrix2& u, int q) {
  const Eigen::Index dim = m.rows();
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Eigen::Index j = i | bit;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex a = m(i, c), b = m(j, c);
      m(i, c) = u(0, 0) * a + u(0, 1) * b;
      m(j, c) = u(1, 0) * a + u(1, 1) * b;
    }
  }
}

/// Left-multiplies by CX(control, target); a row permutation.
inline void apply_left_cx(Matrix& m, int control, int target) {
  const Eigen::Index cbit = Eigen::Index{1} << control;
  const Eigen::Index tbit = Eigen::Index{1} << target;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((i & cbit) && !(i & tbit)) m.row(i).swap(m.row(i | tbit));
  }
}

/// Noiseless unitary of a scheduled circuit, gates applied in start order.
/// Measurements are ignored.
inline Matrix unitary_of(const TimedCircuit& tc, std::span<const double> params = {}) {
  if (tc.n_qubits > 10) throw SimulationError("unitary_of supports at most 10 qubits");
  const Eigen::Index dim = Eigen::Index{1} << tc.n_qubits;
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& tg : tc.gates) {
    const auto& g = tg.gate;
    if (g.kind == GateKind::MEASURE || g.kind == GateKind::DELAY) continue;
    if (g.kind == GateKind::CX) {
      apply_left_cx(u, g.qubits[0], g.qubits[1]);
    } else {
      apply_left(u, mat::single_qubit(g.kind, g.angle.resolve(params)), g.qubits[0]);
    }
  }
  return u;
}

/// |Tr(U^dagger V)| / dim: 1 exactly when U and V agree up to global phase.
inline double trace_fidelity(const Matrix& u, const Matrix& v) {
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

}  // namespace vaqem
