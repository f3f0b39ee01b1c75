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
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/unitary.hpp"

namespace vaqem {

inline constexpr int kMaxDenseQubits = 10;

/// Mixed state on n qubits; qubit q is bit q of the basis index.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// |0...0><0...0|
  explicit DensityMatrix(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxDenseQubits) {
      throw SimulationError("dense density matrices support 1.." + std::to_string(kMaxDenseQubits) + " qubits");
    }
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    rho_ = Matrix::Zero(dim, dim);
    rho_(0, 0) = 1.0;
  }

  static DensityMatrix from_matrix(int n_qubits, Matrix m) {
    DensityMatrix d(n_qubits);
    if (m.rows() != d.dim() || m.cols() != d.dim()) throw SimulationError("density matrix has wrong dimension");
    d.rho_ = std::move(m);
    return d;
  }

  static DensityMatrix pure(int n_qubits, const Vector& psi) {
    return from_matrix(n_qubits, psi * psi.adjoint());
  }

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return rho_(r, c); }

  double trace() const { return rho_.trace().real(); }

  /// Hermitian, unit trace and PSD, each up to the given slack.
  bool is_valid(double herm_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-9) const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > herm_tol) return false;
    if (std::abs(rho_.trace() - Complex(1.0)) > trace_tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -eig_tol;
  }

  void apply_unitary(const Matrix2& u, int q) {
    apply_left(rho_, u, q);
    const Eigen::Index bit = Eigen::Index{1} << q;
    const Matrix2 ua = u.conjugate();
    for (Eigen::Index c = 0; c < dim(); ++c) {
      if (c & bit) continue;
      const Eigen::Index c1 = c | bit;
      for (Eigen::Index r = 0; r < dim(); ++r) {
        const Complex a = rho_(r, c), b = rho_(r, c1);
        rho_(r, c) = a * ua(0, 0) + b * ua(0, 1);
        rho_(r, c1) = a * ua(1, 0) + b * ua(1, 1);
      }
    }
  }

  void apply_cx(int control, int target) {
    apply_left_cx(rho_, control, target);
    const Eigen::Index cbit = Eigen::Index{1} << control;
    const Eigen::Index tbit = Eigen::Index{1} << target;
    for (Eigen::Index c = 0; c < dim(); ++c) {
      if ((c & cbit) && !(c & tbit)) rho_.col(c).swap(rho_.col(c | tbit));
    }
  }

  /// Applies `f` to every 2x2 block of qubit q: f(b00, b01, b10, b11) where
  /// bXY is the entry with row bit X and column bit Y.
  template <typename F>
  void for_each_block(int q, F&& f) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index r = 0; r < dim(); ++r) {
      if (r & bit) continue;
      for (Eigen::Index c = 0; c < dim(); ++c) {
        if (c & bit) continue;
        f(rho_(r, c), rho_(r, c | bit), rho_(r | bit, c), rho_(r | bit, c | bit));
      }
    }
  }

  /// rho -> sum_k K rho K^dagger for single-qubit Kraus operators.
  void apply_kraus(std::span<const Matrix2> kraus, int q) {
    Matrix out = Matrix::Zero(dim(), dim());
    for (const auto& k : kraus) {
      DensityMatrix tmp = *this;
      apply_left(tmp.rho_, k, q);
      const Eigen::Index bit = Eigen::Index{1} << q;
      const Matrix2 kc = k.conjugate();
      for (Eigen::Index c = 0; c < dim(); ++c) {
        if (c & bit) continue;
        const Eigen::Index c1 = c | bit;
        for (Eigen::Index r = 0; r < dim(); ++r) {
          const Complex a = tmp.rho_(r, c), b = tmp.rho_(r, c1);
          tmp.rho_(r, c) = a * kc(0, 0) + b * kc(0, 1);
          tmp.rho_(r, c1) = a * kc(1, 0) + b * kc(1, 1);
        }
      }
      out += tmp.rho_;
    }
    rho_ = std::move(out);
  }

  /// (1 - p) rho + p Tr_q(rho) (x) I/2
  void depolarize(double p, int q) {
    if (p <= 0.0) return;
    for_each_block(q, [p](Complex& b00, Complex& b01, Complex& b10, Complex& b11) {
      const Complex avg = 0.5 * (b00 + b11);
      b00 = (1 - p) * b00 + p * avg;
      b11 = (1 - p) * b11 + p * avg;
      b01 *= (1 - p);
      b10 *= (1 - p);
    });
  }

  /// (1 - p) rho + p Tr_{q0 q1}(rho) (x) I/4
  void depolarize2(double p, int q0, int q1) {
    if (p <= 0.0) return;
    const Eigen::Index b0 = Eigen::Index{1} << q0, b1 = Eigen::Index{1} << q1;
    const Eigen::Index offs[4] = {0, b0, b1, b0 | b1};
    for (Eigen::Index r = 0; r < dim(); ++r) {
      if (r & (b0 | b1)) continue;
      for (Eigen::Index c = 0; c < dim(); ++c) {
        if (c & (b0 | b1)) continue;
        Complex avg = 0;
        for (auto o : offs) avg += rho_(r | o, c | o);
        avg *= 0.25;
        for (auto oi : offs) {
          for (auto oj : offs) {
            auto& e = rho_(r | oi, c | oj);
            e = (1 - p) * e + (oi == oj ? p * avg : Complex(0));
          }
        }
      }
    }
  }

  /// Amplitude damping with decay probability gamma.
  void amplitude_damp(double gamma, int q) {
    if (gamma <= 0.0) return;
    const double keep = std::sqrt(1.0 - gamma);
    for_each_block(q, [gamma, keep](Complex& b00, Complex& b01, Complex& b10, Complex& b11) {
      b00 += gamma * b11;
      b11 *= (1.0 - gamma);
      b01 *= keep;
      b10 *= keep;
    });
  }

  /// Phase flip with probability lambda/2: coherences shrink by (1 - lambda).
  void dephase(double lambda, int q) {
    if (lambda <= 0.0) return;
    for_each_block(q, [lambda](Complex&, Complex& b01, Complex& b10, Complex&) {
      b01 *= (1.0 - lambda);
      b10 *= (1.0 - lambda);
    });
  }

 private:
  int n_ = 0;
  Matrix rho_;
};

/// Outcome distribution over n-bit strings. Character k of a bitstring is
/// qubit k. `shots` is zero for exact (infinite-shot) distributions.
struct CountsDistribution {
  int n_qubits = 0;
  std::vector<double> probs;
  std::uint64_t shots = 0;

  static CountsDistribution point(int n, std::size_t index) {
    CountsDistribution d{n, std::vector<double>(std::size_t{1} << n, 0.0), 0};
    d.probs.at(index) = 1.0;
    return d;
  }

  static std::string bitstring(std::size_t index, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q) {
      if ((index >> q) & 1U) s[static_cast<std::size_t>(q)] = '1';
    }
    return s;
  }

  static std::size_t index_of(std::string_view bits) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
      if (bits[q] == '1') {
        idx |= std::size_t{1} << q;
      } else if (bits[q] != '0') {
        throw Error("bitstring must contain only 0 and 1");
      }
    }
    return idx;
  }

  /// Nonzero entries keyed by bitstring.
  std::map<std::string, double> to_map() const {
    std::map<std::string, double> m;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] != 0.0) m[bitstring(i, n_qubits)] = probs[i];
    }
    return m;
  }

  static CountsDistribution from_map(int n, const std::map<std::string, double>& m) {
    CountsDistribution d{n, std::vector<double>(std::size_t{1} << n, 0.0), 0};
    for (const auto& [k, v] : m) {
      if (static_cast<int>(k.size()) != n) throw Error("bitstring length does not match qubit count");
      d.probs[index_of(k)] += v;
    }
    return d;
  }

  double total() const {
    double s = 0;
    for (double p : probs) s += p;
    return s;
  }
};

/// Total-variation distance between two distributions on the same qubits.
inline double total_variation(const CountsDistribution& p, const CountsDistribution& q) {
  if (p.probs.size() != q.probs.size()) throw Error("distributions have different sizes");
  double s = 0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) s += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * s;
}

/// (sum_i sqrt(p_i q_i))^2
inline double hellinger_fidelity(const CountsDistribution& p, const CountsDistribution& q) {
  if (p.n_qubits != q.n_qubits || p.probs.size() != q.probs.size()) {
    throw Error("hellinger_fidelity needs distributions over the same qubits");
  }
  double bc = 0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) bc += std::sqrt(std::max(0.0, p.probs[i] * q.probs[i]));
  return std::clamp(bc * bc, 0.0, 1.0);
}

/// Idle evolution of one qubit for t seconds: coherent RZ(omega * t), then
/// amplitude damping, then pure dephasing with 1/Tphi = 1/T2 - 1/(2 T1).
inline void apply_idle(DensityMatrix& rho, int qubit, double t, const NoiseModel& noise, double omega) {
  if (t <= 0.0) return;
  const auto& qn = noise.qubit(qubit);
  if (omega != 0.0) rho.apply_unitary(mat::rz(omega * t), qubit);
  const double gamma = std::isinf(qn.t1) ? 0.0 : 1.0 - std::exp(-t / qn.t1);
  rho.amplitude_damp(gamma, qubit);
  const double rate = std::max(0.0, 1.0 / qn.t2 - 0.5 / qn.t1);
  rho.dephase(1.0 - std::exp(-t * rate), qubit);
}

/// Ideal gate, depolarizing error on the acted qubits, then idle noise on
/// those qubits for the gate's duration. Measurements are left to
/// measure_distribution.
inline void apply_gate(DensityMatrix& rho, const TimedGate& tg, const NoiseModel& noise,
                       std::span<const double> omegas, std::span<const double> params = {},
                       double cycle_seconds = 35.56e-9) {
  const auto& g = tg.gate;
  if (g.kind == GateKind::MEASURE || g.kind == GateKind::DELAY) return;
  const double p = noise.error_of(g.kind);
  if (g.kind == GateKind::CX) {
    rho.apply_cx(g.qubits[0], g.qubits[1]);
    rho.depolarize2(p, g.qubits[0], g.qubits[1]);
  } else {
    rho.apply_unitary(mat::single_qubit(g.kind, g.angle.resolve(params)), g.qubits[0]);
    rho.depolarize(p, g.qubits[0]);
  }
  const double t = static_cast<double>(tg.duration) * cycle_seconds;
  for (int q : g.qubits) {
    apply_idle(rho, q, t, noise, omegas.empty() ? 0.0 : omegas[static_cast<std::size_t>(q)]);
  }
}

/// Detuning realised on each qubit for realization `index` of a run seeded
/// with `seed`. Quasi-static qubits draw from N(omega, sigma^2).
inline std::vector<double> realize_detuning(const NoiseModel& noise, int n_qubits, std::uint64_t seed,
                                            std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<double> out(static_cast<std::size_t>(n_qubits), 0.0);
  for (int q = 0; q < n_qubits; ++q) {
    const auto& qn = noise.qubit(q);
    switch (qn.detuning) {
      case DetuningMode::None: break;
      case DetuningMode::Systematic: out[static_cast<std::size_t>(q)] = qn.omega; break;
      case DetuningMode::QuasiStatic: {
        std::normal_distribution<double> dist(qn.omega, qn.sigma);
        out[static_cast<std::size_t>(q)] = qn.sigma > 0 ? dist(rng) : qn.omega;
        break;
      }
    }
  }
  return out;
}

/// One noisy pass over a scheduled circuit with fixed per-qubit detuning.
/// Idle noise for a gap is applied when the next gate on that qubit is
/// reached; gates are visited in start order.
inline DensityMatrix evolve_once(const TimedCircuit& tc, std::span<const double> params, const NoiseModel& noise,
                                 std::span<const double> omegas) {
  DensityMatrix rho(tc.n_qubits);
  const double cycle = tc.durations.cycle_seconds;
  std::vector<Cycles> last_end(static_cast<std::size_t>(tc.n_qubits), -1);
  for (const auto& tg : tc.gates) {
    for (int q : tg.gate.qubits) {
      const Cycles prev = last_end[static_cast<std::size_t>(q)];
      if (prev >= 0 && tg.start > prev) {
        apply_idle(rho, q, static_cast<double>(tg.start - prev) * cycle, noise, omegas[static_cast<std::size_t>(q)]);
      }
      last_end[static_cast<std::size_t>(q)] = tg.end();
    }
    apply_gate(rho, tg, noise, omegas, params, cycle);
  }
  return rho;
}

struct EvolveOptions {
  std::uint64_t seed = 1;
  int realizations = 0;  // 0: take the count from the noise model
};

/// Noisy final state of `tc`, averaged over detuning realizations in a fixed
/// order. Deterministic in (circuit, params, noise, seed).
inline DensityMatrix evolve(const TimedCircuit& tc, std::span<const double> params, const NoiseModel& noise,
                            const EvolveOptions& opts = {}) {
  if (tc.n_qubits > kMaxDenseQubits) {
    throw SimulationError("circuit has " + std::to_string(tc.n_qubits) + " qubits; the dense backend supports " +
                          std::to_string(kMaxDenseQubits));
  }
  if (opts.realizations < 0) throw SimulationError("realizations must be positive");
  noise.validate(tc.n_qubits);
  int count = noise.effective_realizations();
  if (opts.realizations > 0 && count > 1) count = opts.realizations;
  if (params.size() < tc.parameters.size()) throw SimulationError("parameter vector is shorter than the slot list");

  Matrix acc;
  for (int r = 0; r < count; ++r) {
    const auto omegas = realize_detuning(noise, tc.n_qubits, opts.seed, static_cast<std::uint64_t>(r));
    DensityMatrix one = evolve_once(tc, params, noise, omegas);
    if (r == 0) {
      acc = one.matrix();
    } else {
      acc += one.matrix();
    }
  }
  acc /= static_cast<double>(count);
  return DensityMatrix::from_matrix(tc.n_qubits, std::move(acc));
}

/// Z-basis outcome probabilities with the readout confusion applied
/// (observed = A * ideal).
inline CountsDistribution measure_distribution(const DensityMatrix& rho, const NoiseModel& noise) {
  const auto dim = static_cast<std::size_t>(rho.dim());
  CountsDistribution out{rho.n_qubits(), std::vector<double>(dim), 0};
  for (std::size_t i = 0; i < dim; ++i) out.probs[i] = std::max(0.0, rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
  if (noise.confusion) {
    if (noise.confusion->rows() != rho.dim()) throw SimulationError("readout matrix does not match qubit count");
    const Eigen::Map<const Eigen::VectorXd> p(out.probs.data(), rho.dim());
    const Eigen::VectorXd q = (*noise.confusion) * p;
    for (std::size_t i = 0; i < dim; ++i) out.probs[i] = q(static_cast<Eigen::Index>(i));
    return out;
  }
  for (int qb = 0; qb < rho.n_qubits(); ++qb) {
    const auto& qn = noise.qubit(qb);
    if (qn.p01 == 0.0 && qn.p10 == 0.0) continue;
    const std::size_t bit = std::size_t{1} << qb;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const double p0 = out.probs[i], p1 = out.probs[i | bit];
      out.probs[i] = (1 - qn.p01) * p0 + qn.p10 * p1;
      out.probs[i | bit] = qn.p01 * p0 + (1 - qn.p10) * p1;
    }
  }
  return out;
}

/// Draws `shots` outcomes from `exact` and returns the empirical distribution.
inline CountsDistribution sample_counts(const CountsDistribution& exact, std::uint64_t shots, std::mt19937_64& rng) {
  std::discrete_distribution<std::size_t> dist(exact.probs.begin(), exact.probs.end());
  std::vector<std::uint64_t> counts(exact.probs.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++counts[dist(rng)];
  CountsDistribution out{exact.n_qubits, std::vector<double>(exact.probs.size(), 0.0), shots};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return out;
}

/// Tr[P rho] for a Pauli string whose character k acts on qubit k.
inline double pauli_expectation(const DensityMatrix& rho, std::string_view pauli) {
  if (static_cast<int>(pauli.size()) != rho.n_qubits()) throw Error("Pauli string length does not match qubit count");
  Eigen::Index xmask = 0;
  for (std::size_t q = 0; q < pauli.size(); ++q) {
    const char c = pauli[q];
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw Error("Pauli strings use only I, X, Y, Z");
    if (c == 'X' || c == 'Y') xmask |= Eigen::Index{1} << q;
  }
  Complex acc = 0;
  for (Eigen::Index j = 0; j < rho.dim(); ++j) {
    // P|j> = phase(j) |j ^ xmask>
    Complex phase = 1;
    for (std::size_t q = 0; q < pauli.size(); ++q) {
      const bool bit = (j >> q) & 1;
      switch (pauli[q]) {
        case 'Y': phase *= bit ? Complex(0, -1) : Complex(0, 1); break;
        case 'Z': if (bit) phase = -phase; break;
        default: break;
      }
    }
    acc += phase * rho(j, j ^ xmask);
  }
  return acc.real();
}

}  // namespace vaqem
