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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "vaqem/benchmarks.hpp"
#include "vaqem/hamiltonian.hpp"
#include "vaqem/mitigation.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/tuner.hpp"

namespace vaqem {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Git blob id ("blob <size>\0" + content, SHA-1) as lowercase hex.
inline std::string content_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline std::string read_text_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + what + ": " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline std::string resolve_path(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.string();
}

inline ObjectiveMode mode_from_name(const std::string& s) {
  if (s == "exact") return ObjectiveMode::Exact;
  if (s == "sampled") return ObjectiveMode::Sampled;
  throw ConfigError("unknown objective mode '" + s + "'");
}

inline SimOptions sim_from_json(const Json& j, SimOptions base, const std::string& where) {
  check_keys(j, where, {"mode", "shots", "mem", "realizations"});
  base.mode = mode_from_name(get_or<std::string>(j, "mode", base.mode == ObjectiveMode::Exact ? "exact" : "sampled", where));
  base.shots = get_or<std::uint64_t>(j, "shots", base.shots, where);
  base.mem = get_or<bool>(j, "mem", base.mem, where);
  base.realizations = get_or<int>(j, "realizations", base.realizations, where);
  if (base.realizations < 0) throw ConfigError(where + ".realizations must be non-negative");
  return base;
}

inline Json sim_to_json(const SimOptions& s) {
  return Json{{"mode", s.mode == ObjectiveMode::Exact ? "exact" : "sampled"},
              {"shots", s.shots},
              {"mem", s.mem},
              {"realizations", s.realizations}};
}

inline Json hamiltonian_to_json(const PauliHamiltonian& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms) terms.push_back(Json{{"pauli", t.pauli}, {"coeff", t.coeff}});
  return Json{{"terms", terms}};
}

}  // namespace detail

/// Noise given as "defaults", "ideal", {"file": path} or {"inline": text}.
inline NoiseModel noise_from_json(const Json& j, const std::string& base_dir, std::string* source = nullptr) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (source) *source = s;
    if (s == "defaults") return NoiseModel::defaults();
    if (s == "ideal") return NoiseModel::ideal();
    throw ConfigError("noise must be \"defaults\", \"ideal\", {\"file\": ...} or {\"inline\": ...}");
  }
  detail::check_keys(j, "noise", {"file", "inline"});
  if (j.contains("file")) {
    const auto path = detail::resolve_path(j.at("file").get<std::string>(), base_dir);
    if (source) *source = path;
    return load_noise_model(path);
  }
  if (source) *source = "inline";
  return parse_noise_model(detail::get_or<std::string>(j, "inline", "", "noise"));
}

/// Hamiltonian given as {"tfim": {n, J, g}}, {"file": path} or {"terms": [...]}.
inline PauliHamiltonian hamiltonian_from_json(const Json& j, const std::string& base_dir, std::string* source = nullptr,
                                              std::vector<std::string>* warnings = nullptr) {
  detail::check_keys(j, "hamiltonian", {"tfim", "file", "terms"});
  if (j.size() != 1) throw ConfigError("hamiltonian needs exactly one of tfim, file, terms");
  if (j.contains("tfim")) {
    const auto& t = j.at("tfim");
    detail::check_keys(t, "hamiltonian.tfim", {"n", "J", "g"});
    const int n = detail::get_or<int>(t, "n", 4, "hamiltonian.tfim");
    if (n < 1) throw ConfigError("hamiltonian.tfim.n must be positive");
    if (source) *source = "tfim";
    return tfim_hamiltonian(n, detail::get_or<double>(t, "J", 1.0, "hamiltonian.tfim"),
                            detail::get_or<double>(t, "g", 1.0, "hamiltonian.tfim"));
  }
  if (j.contains("file")) {
    const auto path = detail::resolve_path(j.at("file").get<std::string>(), base_dir);
    if (source) *source = path;
    auto f = load_hamiltonian(path);
    if (warnings) warnings->insert(warnings->end(), f.warnings.begin(), f.warnings.end());
    return f.hamiltonian;
  }
  if (source) *source = "terms";
  PauliHamiltonian h;
  if (!j.at("terms").is_array() || j.at("terms").empty()) throw ConfigError("hamiltonian.terms must be a non-empty array");
  for (const auto& t : j.at("terms")) {
    detail::check_keys(t, "hamiltonian.terms[]", {"pauli", "coeff"});
    PauliTerm term{detail::get_or<double>(t, "coeff", 0.0, "hamiltonian.terms[]"),
                   detail::get_or<std::string>(t, "pauli", "", "hamiltonian.terms[]")};
    if (!is_pauli_string(term.pauli)) throw ConfigError("bad Pauli string '" + term.pauli + "'");
    if (h.n_qubits == 0) h.n_qubits = static_cast<int>(term.pauli.size());
    if (static_cast<int>(term.pauli.size()) != h.n_qubits) throw ConfigError("Pauli strings differ in length");
    h.terms.push_back(term);
  }
  return canonicalize(h);
}

/// Parses an experiment config. Relative file paths resolve against
/// `base_dir`. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const Json& j, const std::string& base_dir = "") {
  using detail::get_or;
  detail::check_keys(j, "config", {"schema_version", "seed", "ansatz", "hamiltonian", "noise", "spsa", "theta0",
                                   "noiseless_angles", "grid", "dd_kinds", "tuning", "evaluation", "ladder"});
  const int version = get_or<int>(j, "schema_version", kSchemaVersion, "config");
  if (version != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
  ExperimentConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "config");
  if (j.contains("ansatz")) {
    const auto& a = j.at("ansatz");
    detail::check_keys(a, "ansatz", {"n_qubits", "reps", "entanglement"});
    c.ansatz.n_qubits = get_or<int>(a, "n_qubits", c.ansatz.n_qubits, "ansatz");
    c.ansatz.reps = get_or<int>(a, "reps", c.ansatz.reps, "ansatz");
    const auto e = get_or<std::string>(a, "entanglement", "circular", "ansatz");
    if (e == "circular") {
      c.ansatz.entanglement = Entanglement::Circular;
    } else if (e == "full") {
      c.ansatz.entanglement = Entanglement::Full;
    } else {
      throw ConfigError("unknown entanglement '" + e + "'");
    }
  }
  if (j.contains("hamiltonian")) {
    c.hamiltonian = hamiltonian_from_json(j.at("hamiltonian"), base_dir, &c.hamiltonian_source);
  } else {
    c.hamiltonian = tfim_hamiltonian(c.ansatz.n_qubits, 1.0, 1.0);
  }
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"), base_dir, &c.noise_source);
  if (j.contains("spsa")) {
    const auto& s = j.at("spsa");
    detail::check_keys(s, "spsa", {"a", "c", "A", "alpha", "gamma", "max_iters", "target_step", "calibration_samples",
                                   "resamplings", "blocking", "blocking_tolerance"});
    auto& p = c.spsa;
    p.a = get_or<double>(s, "a", p.a, "spsa");
    p.c = get_or<double>(s, "c", p.c, "spsa");
    p.A = get_or<double>(s, "A", p.A, "spsa");
    p.alpha = get_or<double>(s, "alpha", p.alpha, "spsa");
    p.gamma = get_or<double>(s, "gamma", p.gamma, "spsa");
    p.max_iters = get_or<int>(s, "max_iters", p.max_iters, "spsa");
    p.target_step = get_or<double>(s, "target_step", p.target_step, "spsa");
    p.calibration_samples = get_or<int>(s, "calibration_samples", p.calibration_samples, "spsa");
    p.resamplings = get_or<int>(s, "resamplings", p.resamplings, "spsa");
    p.blocking = get_or<bool>(s, "blocking", p.blocking, "spsa");
    p.blocking_tolerance = get_or<double>(s, "blocking_tolerance", p.blocking_tolerance, "spsa");
  }
  if (j.contains("theta0")) {
    const auto& t = j.at("theta0");
    if (t.is_string() && t == "random") {
      c.theta_init = ThetaInit::Random;
    } else if (t.is_string() && t == "zeros") {
      c.theta_init = ThetaInit::Zeros;
    } else if (t.is_array()) {
      c.theta_init = ThetaInit::Explicit;
      for (const auto& x : t) {
        if (!x.is_number()) throw ConfigError("theta0 entries must be numbers");
        c.theta0.push_back(x.get<double>());
      }
    } else {
      throw ConfigError("theta0 must be \"random\", \"zeros\" or an array");
    }
  }
  c.noiseless_angles = get_or<bool>(j, "noiseless_angles", c.noiseless_angles, "config");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::check_keys(g, "grid", {"positions", "round_values", "joint_cap"});
    c.grid.positions = get_or<int>(g, "positions", c.grid.positions, "grid");
    c.grid.round_values = get_or<int>(g, "round_values", c.grid.round_values, "grid");
    c.grid.joint_cap = get_or<int>(g, "joint_cap", c.grid.joint_cap, "grid");
  }
  if (j.contains("dd_kinds")) {
    c.dd_kinds.clear();
    for (const auto& k : j.at("dd_kinds")) {
      const auto kind = k.is_string() ? dd_from_name(k.get<std::string>()) : std::nullopt;
      if (!kind) throw ConfigError("unknown DD kind " + k.dump());
      c.dd_kinds.push_back(*kind);
    }
    if (c.dd_kinds.empty()) throw ConfigError("dd_kinds must not be empty");
  }
  if (j.contains("tuning")) c.tuning = detail::sim_from_json(j.at("tuning"), c.tuning, "tuning");
  if (j.contains("evaluation")) c.evaluation = detail::sim_from_json(j.at("evaluation"), c.evaluation, "evaluation");
  if (j.contains("ladder")) c.ladder = get_or<std::vector<std::string>>(j, "ladder", {}, "config");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  const auto text = read_text_file(path, "config file");
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

/// Self-contained echo: noise and Hamiltonian are inlined so the echo alone
/// reproduces the run.
inline Json config_to_json(const ExperimentConfig& c) {
  const auto& s = c.spsa;
  Json theta0;
  switch (c.theta_init) {
    case ThetaInit::Random: theta0 = "random"; break;
    case ThetaInit::Zeros: theta0 = "zeros"; break;
    case ThetaInit::Explicit: theta0 = c.theta0; break;
  }
  Json kinds = Json::array();
  for (auto k : c.dd_kinds) kinds.push_back(std::string(dd_name(k)));
  return Json{{"schema_version", kSchemaVersion},
              {"seed", c.seed},
              {"ansatz",
               {{"n_qubits", c.ansatz.n_qubits},
                {"reps", c.ansatz.reps},
                {"entanglement", std::string(entanglement_name(c.ansatz.entanglement))}}},
              {"hamiltonian", detail::hamiltonian_to_json(c.hamiltonian)},
              {"noise", {{"inline", to_text(c.noise)}}},
              {"spsa",
               {{"a", s.a},
                {"c", s.c},
                {"A", s.A},
                {"alpha", s.alpha},
                {"gamma", s.gamma},
                {"max_iters", s.max_iters},
                {"target_step", s.target_step},
                {"calibration_samples", s.calibration_samples},
                {"resamplings", s.resamplings},
                {"blocking", s.blocking},
                {"blocking_tolerance", s.blocking_tolerance}}},
              {"theta0", theta0},
              {"noiseless_angles", c.noiseless_angles},
              {"grid", {{"positions", c.grid.positions}, {"round_values", c.grid.round_values}, {"joint_cap", c.grid.joint_cap}}},
              {"dd_kinds", kinds},
              {"tuning", detail::sim_to_json(c.tuning)},
              {"evaluation", detail::sim_to_json(c.evaluation)},
              {"ladder", c.ladder}};
}

inline Json window_to_json(const IdleWindow& w) {
  return Json{{"qubit", w.qubit}, {"start", w.start}, {"end", w.end}, {"length", w.length()}};
}

inline Json setting_to_json(const WindowSetting& s) {
  return Json{{"kind", std::string(dd_name(s.kind))}, {"rounds", s.rounds}, {"fraction", s.fraction}};
}

/// Result document for a VQE run. Wall-clock data lives only under
/// "timings" so the rest is reproducible byte for byte.
inline Json result_to_json(const ExperimentConfig& cfg, const VaqemReport& r) {
  Json out;
  const Json echo = config_to_json(cfg);
  out["schema_version"] = kSchemaVersion;
  out["command"] = "vqe";
  out["input_hash"] = content_hash(echo.dump());
  out["config"] = echo;
  out["e0"] = r.e0 ? Json(*r.e0) : Json(nullptr);

  const auto* base = r.entry("baseline_mem");
  Json ladder = Json::array();
  for (const auto& e : r.ladder) {
    Json item{{"name", e.name}, {"objective", e.value}};
    const auto ratio = base ? improvement_ratio(base->value, e.value, r.e0) : std::nullopt;
    item["improvement"] = ratio ? Json(*ratio) : Json(nullptr);
    ladder.push_back(item);
  }
  out["ladder"] = ladder;

  Json iters = Json::array();
  for (const auto& it : r.trace.iterations) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(it.params_hash));
    iters.push_back(Json{{"value", it.value}, {"params_hash", hash}});
  }
  out["trace"] = Json{{"theta0", r.theta0},
                      {"best_params", r.trace.best_params},
                      {"best_value", r.trace.best_value},
                      {"evaluations", r.trace.evaluations},
                      {"gain_a", r.trace.gain_a},
                      {"iterations", iters}};

  Json windows = Json::array();
  for (std::size_t i = 0; i < r.windows.size(); ++i) {
    Json w = window_to_json(r.windows[i]);
    const auto add = [&](const char* key, const TuneResult& t) {
      if (i >= t.windows.size()) return;
      const auto& rep = t.windows[i];
      w["movable"] = rep.movable;
      Json s = setting_to_json(rep.chosen);
      s["objective"] = rep.chosen_value;
      s["points"] = rep.points;
      w[key] = s;
    };
    add("vaqem_gs_xy", r.tuned);
    add("vaqem_dd", r.tuned_dd);
    add("vaqem_gs", r.tuned_gs);
    windows.push_back(w);
  }
  out["windows"] = windows;
  const TuneResult* any = !r.tuned.windows.empty() ? &r.tuned : !r.tuned_dd.windows.empty() ? &r.tuned_dd : &r.tuned_gs;
  out["window_baseline_objective"] = any->windows.empty() ? Json(nullptr) : Json(any->windows.front().baseline_value);
  out["timings"] = Json{{"angles_seconds", r.timings.angles_seconds},
                        {"mitigation_seconds", r.timings.mitigation_seconds},
                        {"ladder_seconds", r.timings.ladder_seconds}};
  return out;
}

/// Result document for a single-qubit sweep benchmark.
inline Json sweep_to_json(const std::string& command, const Json& echo, const SweepCurve& curve, const char* x_name,
                          double seconds) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = command;
  out["input_hash"] = content_hash(echo.dump());
  out["config"] = echo;
  out["window"] = window_to_json(curve.window);
  Json samples = Json::array();
  for (const auto& s : curve.samples) samples.push_back(Json{{x_name, s.x}, {"fidelity", s.fidelity}});
  out["samples"] = samples;
  const auto& best = curve.samples.at(curve.argmax);
  out["argmax"] = Json{{x_name, best.x}, {"fidelity", best.fidelity}};
  out["timings"] = Json{{"seconds", seconds}};
  return out;
}

/// Drops the wall-clock field; what remains must be identical across reruns.
inline Json without_timings(Json j) {
  j.erase("timings");
  return j;
}

// ---------------------------------------------------------------------------
// Readout calibration check

struct MemCheck {
  CountsDistribution truth;
  CountsDistribution raw;
  CountsDistribution corrected;
  double tv_before = 0.0;
  double tv_after = 0.0;
  std::vector<std::string> warnings;
};

/// Calibrates readout, then corrects the measured distribution of an ideally
/// prepared GHZ state. shots == 0 uses exact distributions.
inline MemCheck mem_check(int n_qubits, const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed = 1) {
  if (n_qubits < 1 || n_qubits > 6) throw ConfigError("mem-check supports 1 to 6 qubits");
  noise.validate(n_qubits);
  Circuit ghz;
  ghz.n_qubits = n_qubits;
  ghz.gates.push_back(Gate::single(GateKind::H, 0));
  for (int q = 1; q < n_qubits; ++q) ghz.gates.push_back(Gate::cx(q - 1, q));
  const auto tc = schedule_alap(ghz, noise.durations);
  const auto rho = evolve(tc, {}, NoiseModel::ideal());
  MemCheck out;
  out.truth = measure_distribution(rho, NoiseModel::ideal());
  out.raw = measure_distribution(rho, readout_only(noise, n_qubits));
  if (shots > 0) {
    std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ULL);
    out.raw = sample_counts(out.raw, shots, rng);
  }
  const auto a = mem_calibrate(n_qubits, noise, MemOptions{shots, seed, false, false});
  out.corrected = mem_correct(out.raw, a, &out.warnings);
  out.tv_before = total_variation(out.raw, out.truth);
  out.tv_after = total_variation(out.corrected, out.truth);
  return out;
}

}  // namespace vaqem
