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

// Walks through the library: parse a circuit, schedule it, inspect idle
// windows, add mitigation and compare noisy energies.
//
//   usage: vaqem_usage [circuit.qasm] [noise.txt]

#include <cstdio>
#include <iostream>

#include "vaqem.hpp"

int main(int argc, char** argv) {
  using namespace vaqem;
  try {
    const std::string qasm_path = argc > 1 ? argv[1] : VAQEM_SAMPLES_DIR "/circuits/bell_echo.qasm";
    const NoiseModel noise = argc > 2 ? load_noise_model(argv[2]) : NoiseModel::defaults();

    const auto circuit = qasm::parse(read_text_file(qasm_path, "circuit"));
    const auto tc = schedule_alap(circuit, noise.durations);
    std::printf("%d qubits, %zu gates, %lld cycles\n", tc.n_qubits, tc.gates.size(),
                static_cast<long long>(tc.length()));

    const auto windows = extract_idle_windows(tc, 2);
    for (const auto& w : windows) {
      std::printf("  idle q%d [%lld, %lld) movable=%d max XY4 rounds=%d\n", w.qubit, static_cast<long long>(w.start),
                  static_cast<long long>(w.end), has_movable_gate(tc, w), max_rounds(w, DDKind::XY4, tc.durations));
    }

    // Fidelity of the measured distribution with and without one XY4 round per window.
    const auto ideal = ideal_distribution(tc);
    const auto plain = measure_distribution(evolve(tc, {}, noise), noise);
    const auto with_dd = apply_config(tc, windows, fixed_dd_config(tc, windows, DDKind::XY4));
    const auto dd = measure_distribution(evolve(with_dd, {}, noise), noise);
    std::printf("Hellinger fidelity: %.4f without DD, %.4f with XY4\n", hellinger_fidelity(plain, ideal),
                hellinger_fidelity(dd, ideal));

    // Energy of a small ansatz at random angles, raw and readout-corrected.
    const auto h = tfim_hamiltonian(2, 1.0, 1.0);
    const auto ansatz = schedule_alap(su2_ansatz({2, 1, Entanglement::Circular}), noise.durations);
    const std::vector<double> theta(ansatz.parameters.size(), 0.4);
    const auto a = mem_calibrate(2, noise);
    const SimOptions raw{ObjectiveMode::Sampled, 0, false, 1, 0};
    SimOptions mem = raw;
    mem.mem = true;
    std::printf("E0 = %.5f, noisy <H> = %.5f, with MEM = %.5f\n", exact_ground_energy(h).energy,
                objective(ansatz, theta, h, noise, raw), objective(ansatz, theta, h, noise, mem, &a));
    std::cout << "\nre-emitted circuit:\n" << qasm::emit(to_gate_list(tc), tc.n_qubits, tc.parameters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
