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

// vaqem: command-line front end.
//
//   vaqem vqe        --config cfg.json [--noise file] [--out result.json] [--seed N] [--ladder a,b] [--grid N]
//   vaqem spin-echo  --noise file --positions N [--delay cycles] [--out result.json]
//   vaqem dd-sweep   --noise file --kind XY4 [--delay cycles] [--out result.json]
//   vaqem mem-check  -n 2 --noise file [--shots N] [--out result.json]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vaqem.hpp"

namespace {

using vaqem::Json;

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

void write_result(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw vaqem::Error("cannot write output file: " + path);
  out << text;
  if (!out) throw vaqem::Error("failed writing output file: " + path);
}

vaqem::NoiseModel noise_or_defaults(const std::string& path) {
  if (path.empty() || path == "defaults") return vaqem::NoiseModel::defaults();
  if (path == "ideal") return vaqem::NoiseModel::ideal();
  return vaqem::load_noise_model(path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational tuning of idle-window error mitigation on a simulated noisy backend"};
  app.require_subcommand(1);

  std::string config_path, noise_path, out_path, ladder, kind = "XY4";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  int positions = 9;
  long long delay = -1;
  int n_qubits = 2;
  std::uint64_t shots = 0;

  auto* vqe = app.add_subcommand("vqe", "two-stage tuning and evaluation ladder");
  vqe->add_option("--config", config_path, "experiment config (JSON)")->required();
  vqe->add_option("--noise", noise_path, "noise file, overrides the config");
  vqe->add_option("--out", out_path, "result file (stdout if omitted)");
  vqe->add_option("--seed", seed, "seed, overrides the config");
  vqe->add_option("--ladder", ladder, "comma-separated ladder subset");
  vqe->add_option("--grid", grid, "gate positions per window sweep");

  auto* echo = app.add_subcommand("spin-echo", "gate-position sweep on the single-qubit echo circuit");
  echo->add_option("--noise", noise_path, "noise file ('defaults' or 'ideal' also accepted)");
  echo->add_option("--positions", positions, "number of gate positions")->check(CLI::Range(2, 100000));
  echo->add_option("--delay", delay, "window length in cycles");
  echo->add_option("--out", out_path, "result file (stdout if omitted)");
  echo->add_option("--seed", seed, "seed");

  auto* dd = app.add_subcommand("dd-sweep", "DD round-count sweep on the single-qubit idle circuit");
  dd->add_option("--noise", noise_path, "noise file ('defaults' or 'ideal' also accepted)");
  dd->add_option("--kind", kind, "XX, YY or XY4");
  dd->add_option("--delay", delay, "window length in cycles");
  dd->add_option("--out", out_path, "result file (stdout if omitted)");
  dd->add_option("--seed", seed, "seed");

  auto* mem = app.add_subcommand("mem-check", "readout calibration and correction check");
  mem->add_option("-n", n_qubits, "qubits")->check(CLI::Range(1, 6));
  mem->add_option("--noise", noise_path, "noise file ('defaults' or 'ideal' also accepted)");
  mem->add_option("--shots", shots, "shots (0: exact distributions)");
  mem->add_option("--out", out_path, "result file (stdout if omitted)");
  mem->add_option("--seed", seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*vqe) {
      auto cfg = vaqem::load_config(config_path);
      if (!noise_path.empty()) {
        cfg.noise = vaqem::load_noise_model(noise_path);
        cfg.noise_source = noise_path;
      }
      if (seed) cfg.seed = *seed;
      if (!ladder.empty()) cfg.ladder = split_list(ladder);
      if (grid) cfg.grid.positions = *grid;
      cfg.validate();
      const auto report = vaqem::vaqem_run(cfg);
      write_result(vaqem::result_to_json(cfg, report), out_path);
    } else if (*echo) {
      const auto noise = noise_or_defaults(noise_path);
      const vaqem::Cycles d = delay < 0 ? vaqem::kSpinEchoDelay : delay;
      const std::uint64_t s = seed.value_or(1);
      const auto curve = vaqem::spin_echo_sweep(noise, positions, s, d);
      const Json cfg{{"noise", {{"inline", vaqem::to_text(noise)}}}, {"positions", positions}, {"delay", d}, {"seed", s}};
      write_result(vaqem::sweep_to_json("spin-echo", cfg, curve, "fraction", seconds_since(t0)), out_path);
    } else if (*dd) {
      const auto k = vaqem::dd_from_name(kind);
      if (!k) throw vaqem::ConfigError("unknown DD kind '" + kind + "'");
      const auto noise = noise_or_defaults(noise_path);
      const vaqem::Cycles d = delay < 0 ? vaqem::kDDSweepDelay : delay;
      const std::uint64_t s = seed.value_or(1);
      const auto curve = vaqem::dd_sweep(noise, *k, s, d);
      const Json cfg{{"noise", {{"inline", vaqem::to_text(noise)}}},
                     {"kind", std::string(vaqem::dd_name(*k))},
                     {"delay", d},
                     {"seed", s}};
      write_result(vaqem::sweep_to_json("dd-sweep", cfg, curve, "rounds", seconds_since(t0)), out_path);
    } else if (*mem) {
      const auto noise = noise_or_defaults(noise_path);
      const std::uint64_t s = seed.value_or(1);
      const auto check = vaqem::mem_check(n_qubits, noise, shots, s);
      for (const auto& w : check.warnings) std::cerr << "warning: " << w << "\n";
      std::fprintf(stderr, "TV before correction: %.6e\nTV after correction:  %.6e\n", check.tv_before, check.tv_after);
      const Json cfg{{"noise", {{"inline", vaqem::to_text(noise)}}}, {"n", n_qubits}, {"shots", shots}, {"seed", s}};
      Json out;
      out["schema_version"] = vaqem::kSchemaVersion;
      out["command"] = "mem-check";
      out["input_hash"] = vaqem::content_hash(cfg.dump());
      out["config"] = cfg;
      out["truth"] = check.truth.probs;
      out["raw"] = check.raw.probs;
      out["corrected"] = check.corrected.probs;
      out["tv_before"] = check.tv_before;
      out["tv_after"] = check.tv_after;
      out["timings"] = Json{{"seconds", seconds_since(t0)}};
      write_result(out, out_path);
    }
  } catch (const vaqem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const vaqem::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
