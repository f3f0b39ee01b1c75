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
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"

namespace vaqem {

enum class DetuningMode { None, Systematic, QuasiStatic };

inline std::string_view detuning_name(DetuningMode m) {
  switch (m) {
    case DetuningMode::None: return "none";
    case DetuningMode::Systematic: return "systematic";
    case DetuningMode::QuasiStatic: return "quasi-static";
  }
  return "none";
}

/// Decoherence, detuning and readout parameters of one qubit. Times in
/// seconds, detuning in rad/s. An infinite T1 or T2 disables that channel.
struct QubitNoise {
  double t1 = 100e-6;
  double t2 = 80e-6;
  DetuningMode detuning = DetuningMode::QuasiStatic;
  double omega = 0.0;
  double sigma = 2.0 * kPi * 5e3;
  double p01 = 0.02;  // P(read 1 | prepared 0)
  double p10 = 0.02;  // P(read 0 | prepared 1)

  friend bool operator==(const QubitNoise&, const QubitNoise&) = default;
};

/// Noise model for the density-matrix backend.
///
/// Per-qubit arrays of length one apply to every qubit. Gate errors are
/// depolarizing probabilities keyed by gate kind. A full readout confusion
/// matrix, when present, replaces the per-qubit flip pairs.
struct NoiseModel {
  std::vector<QubitNoise> qubits{QubitNoise{}};
  std::map<GateKind, double> gate_error;
  double p_1q = 3e-4;
  double p_cx = 1e-2;
  std::optional<Eigen::MatrixXd> confusion;  // column-stochastic, 2^n x 2^n
  int realizations = 32;
  DurationTable durations;

  static NoiseModel defaults() { return NoiseModel{}; }

  /// No decoherence, no detuning, perfect gates and readout.
  static NoiseModel ideal() {
    NoiseModel m;
    const double inf = std::numeric_limits<double>::infinity();
    m.qubits = {QubitNoise{inf, inf, DetuningMode::None, 0.0, 0.0, 0.0, 0.0}};
    m.p_1q = 0.0;
    m.p_cx = 0.0;
    m.realizations = 1;
    return m;
  }

  const QubitNoise& qubit(int q) const {
    if (qubits.size() == 1) return qubits.front();
    return qubits.at(static_cast<std::size_t>(q));
  }

  QubitNoise& qubit(int q) {
    if (qubits.size() == 1) return qubits.front();
    return qubits.at(static_cast<std::size_t>(q));
  }

  /// Depolarizing probability for a gate kind.
  double error_of(GateKind k) const {
    if (auto it = gate_error.find(k); it != gate_error.end()) return it->second;
    if (k == GateKind::CX) return p_cx;
    if (k == GateKind::MEASURE || k == GateKind::DELAY) return 0.0;
    return p_1q;
  }

  /// Number of detuning samples needed: one unless some qubit is quasi-static.
  int effective_realizations() const {
    for (const auto& q : qubits) {
      if (q.detuning == DetuningMode::QuasiStatic && q.sigma > 0.0) return realizations;
    }
    return 1;
  }

  bool has_readout_error() const {
    if (confusion) return !confusion->isIdentity(0.0);
    return std::any_of(qubits.begin(), qubits.end(), [](const QubitNoise& q) { return q.p01 > 0 || q.p10 > 0; });
  }

  /// Throws ConfigError when the model is unusable for an n-qubit circuit.
  void validate(int n_qubits) const {
    if (qubits.empty()) throw ConfigError("noise model has no qubit entries");
    if (qubits.size() != 1 && static_cast<int>(qubits.size()) < n_qubits) {
      throw ConfigError("noise model lists " + std::to_string(qubits.size()) + " qubits, circuit needs " +
                        std::to_string(n_qubits));
    }
    auto prob = [](double p, const std::string& what) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
    };
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      const auto& q = qubits[i];
      const auto tag = "qubit " + std::to_string(i) + ": ";
      if (!(q.t1 > 0) || !(q.t2 > 0)) throw ConfigError(tag + "T1 and T2 must be positive");
      if (q.t2 > 2.0 * q.t1 * (1 + 1e-12)) throw ConfigError(tag + "T2 must not exceed 2*T1");
      if (!std::isfinite(q.omega) || !std::isfinite(q.sigma) || q.sigma < 0) {
        throw ConfigError(tag + "detuning must be finite with sigma >= 0");
      }
      prob(q.p01, tag + "p01");
      prob(q.p10, tag + "p10");
    }
    prob(p_1q, "p_1q");
    prob(p_cx, "p_cx");
    for (const auto& [k, p] : gate_error) prob(p, "p_" + std::string(gate_name(k)));
    if (realizations < 1) throw ConfigError("realizations must be at least 1");
    if (confusion) {
      const auto dim = Eigen::Index{1} << n_qubits;
      if (confusion->rows() != dim || confusion->cols() != dim) {
        throw ConfigError("readout matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
      }
      for (Eigen::Index c = 0; c < dim; ++c) {
        if ((confusion->col(c).array() < 0).any() || std::abs(confusion->col(c).sum() - 1.0) > 1e-9) {
          throw ConfigError("readout matrix column " + std::to_string(c) + " is not a probability vector");
        }
      }
    }
    if (durations.single_qubit < 1 || durations.cx < 1 || durations.measure < 0 || !(durations.cycle_seconds > 0)) {
      throw ConfigError("gate durations must be positive");
    }
  }
};

namespace detail {

inline std::vector<double> parse_numbers(const std::string& text, int line) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<double> out;
  std::string word;
  while (is >> word) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(word, &used));
      if (used != word.size()) throw std::invalid_argument(word);
    } catch (const std::exception&) {
      throw ConfigError("noise file line " + std::to_string(line) + ": bad number '" + word + "'");
    }
  }
  if (out.empty()) throw ConfigError("noise file line " + std::to_string(line) + ": missing value");
  return out;
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Reads the key-value noise format:
///
///   # comment
///   t1 = 100e-6 90e-6 ...      per-qubit arrays (or one value for all)
///   t2, detuning_mode, detuning_omega, detuning_sigma, p01, p10
///   p_1q = 3e-4                default single-qubit depolarizing probability
///   p_cx = 1e-2
///   p_x = 5e-4                 per-gate override (p_<gate name>)
///   realizations = 32
///   readout_matrix = ...       optional 2^n x 2^n row-major column-stochastic matrix
///   cycle_ns = 35.56
///   duration_1q = 1, duration_cx = 10, duration_measure = 100
inline NoiseModel parse_noise_model(const std::string& text) {
  NoiseModel m;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  std::size_t width = 1;
  std::map<std::string, std::vector<double>> numeric;
  std::vector<std::string> modes;
  while (std::getline(is, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError("noise file line " + std::to_string(line) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (key == "detuning_mode") {
      std::string cleaned = value;
      std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
      std::istringstream ws(cleaned);
      std::string w;
      modes.clear();
      while (ws >> w) {
        if (w != "none" && w != "systematic" && w != "quasi-static") {
          throw ConfigError("noise file line " + std::to_string(line) + ": unknown detuning mode '" + w + "'");
        }
        modes.push_back(w);
      }
      if (modes.empty()) throw ConfigError("noise file line " + std::to_string(line) + ": missing value");
      width = std::max(width, modes.size());
      continue;
    }
    static const char* kPerQubit[] = {"t1", "t2", "detuning_omega", "detuning_sigma", "p01", "p10"};
    const bool per_qubit = std::find_if(std::begin(kPerQubit), std::end(kPerQubit),
                                        [&](const char* k) { return key == k; }) != std::end(kPerQubit);
    auto nums = detail::parse_numbers(value, line);
    if (per_qubit) {
      width = std::max(width, nums.size());
      numeric[key] = std::move(nums);
      continue;
    }
    if (key != "readout_matrix" && nums.size() != 1) {
      throw ConfigError("noise file line " + std::to_string(line) + ": '" + key + "' takes one value");
    }
    if (key == "p_1q") {
      m.p_1q = nums[0];
    } else if (key == "p_cx") {
      m.p_cx = nums[0];
    } else if (key == "realizations") {
      m.realizations = static_cast<int>(nums[0]);
    } else if (key == "cycle_ns") {
      m.durations.cycle_seconds = nums[0] * 1e-9;
    } else if (key == "duration_1q") {
      m.durations.single_qubit = static_cast<Cycles>(nums[0]);
    } else if (key == "duration_cx") {
      m.durations.cx = static_cast<Cycles>(nums[0]);
    } else if (key == "duration_measure") {
      m.durations.measure = static_cast<Cycles>(nums[0]);
    } else if (key == "readout_matrix") {
      const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(nums.size()))));
      if (side * side != static_cast<Eigen::Index>(nums.size()) || (side & (side - 1)) != 0) {
        throw ConfigError("noise file line " + std::to_string(line) + ": readout_matrix must be 2^n x 2^n");
      }
      Eigen::MatrixXd a(side, side);
      for (Eigen::Index r = 0; r < side; ++r)
        for (Eigen::Index c = 0; c < side; ++c) a(r, c) = nums[static_cast<std::size_t>(r * side + c)];
      m.confusion = a;
    } else if (key.rfind("p_", 0) == 0) {
      const auto gate = key.substr(2);
      bool found = false;
      for (auto k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::RX, GateKind::RY,
                     GateKind::RZ, GateKind::CX}) {
        if (gate_name(k) == gate) {
          m.gate_error[k] = nums[0];
          found = true;
        }
      }
      if (!found) throw ConfigError("noise file line " + std::to_string(line) + ": unknown gate in '" + key + "'");
    } else {
      throw ConfigError("noise file line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }

  m.qubits.assign(width, QubitNoise{});
  auto spread = [&](const std::string& key, auto setter) {
    auto it = numeric.find(key);
    if (it == numeric.end()) return;
    const auto& v = it->second;
    if (v.size() != 1 && v.size() != width) {
      throw ConfigError("noise file: '" + key + "' has " + std::to_string(v.size()) + " entries, expected 1 or " +
                        std::to_string(width));
    }
    for (std::size_t q = 0; q < width; ++q) setter(m.qubits[q], v.size() == 1 ? v[0] : v[q]);
  };
  spread("t1", [](QubitNoise& q, double v) { q.t1 = v; });
  spread("t2", [](QubitNoise& q, double v) { q.t2 = v; });
  spread("detuning_omega", [](QubitNoise& q, double v) { q.omega = v; });
  spread("detuning_sigma", [](QubitNoise& q, double v) { q.sigma = v; });
  spread("p01", [](QubitNoise& q, double v) { q.p01 = v; });
  spread("p10", [](QubitNoise& q, double v) { q.p10 = v; });
  if (!modes.empty()) {
    if (modes.size() != 1 && modes.size() != width) throw ConfigError("noise file: detuning_mode length mismatch");
    for (std::size_t q = 0; q < width; ++q) {
      const auto& w = modes.size() == 1 ? modes[0] : modes[q];
      m.qubits[q].detuning = w == "none" ? DetuningMode::None
                             : w == "systematic" ? DetuningMode::Systematic
                                                 : DetuningMode::QuasiStatic;
    }
  }
  return m;
}

inline NoiseModel load_noise_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_noise_model(ss.str());
}

/// Writes a model in the format read by parse_noise_model.
inline std::string to_text(const NoiseModel& m) {
  std::ostringstream os;
  auto row = [&](const char* key, auto get) {
    os << key << " =";
    for (const auto& q : m.qubits) os << ' ' << get(q);
    os << '\n';
  };
  row("t1", [](const QubitNoise& q) { return detail::format_number(q.t1); });
  row("t2", [](const QubitNoise& q) { return detail::format_number(q.t2); });
  row("detuning_mode", [](const QubitNoise& q) { return std::string(detuning_name(q.detuning)); });
  row("detuning_omega", [](const QubitNoise& q) { return detail::format_number(q.omega); });
  row("detuning_sigma", [](const QubitNoise& q) { return detail::format_number(q.sigma); });
  row("p01", [](const QubitNoise& q) { return detail::format_number(q.p01); });
  row("p10", [](const QubitNoise& q) { return detail::format_number(q.p10); });
  os << "p_1q = " << detail::format_number(m.p_1q) << '\n';
  os << "p_cx = " << detail::format_number(m.p_cx) << '\n';
  for (const auto& [k, p] : m.gate_error) os << "p_" << gate_name(k) << " = " << detail::format_number(p) << '\n';
  os << "realizations = " << m.realizations << '\n';
  os << "cycle_ns = " << detail::format_number(m.durations.cycle_seconds * 1e9) << '\n';
  os << "duration_1q = " << m.durations.single_qubit << '\n';
  os << "duration_cx = " << m.durations.cx << '\n';
  os << "duration_measure = " << m.durations.measure << '\n';
  if (m.confusion) {
    os << "readout_matrix =";
    for (Eigen::Index r = 0; r < m.confusion->rows(); ++r)
      for (Eigen::Index c = 0; c < m.confusion->cols(); ++c) os << ' ' << detail::format_number((*m.confusion)(r, c));
    os << '\n';
  }
  return os.str();
}

}  // namespace vaqem
