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

#include "vaqem/benchmarks.hpp"
#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"
#include "vaqem/experiment.hpp"
#include "vaqem/hamiltonian.hpp"
#include "vaqem/mitigation.hpp"
#include "vaqem/noise_model.hpp"
#include "vaqem/objective.hpp"
#include "vaqem/qasm.hpp"
#include "vaqem/simulator.hpp"
#include "vaqem/spsa.hpp"
#include "vaqem/tuner.hpp"
#include "vaqem/unitary.hpp"
