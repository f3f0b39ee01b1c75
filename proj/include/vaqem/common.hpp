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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vaqem {

/// Device time in integer cycles.
using Cycles = std::int64_t;

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problems with a circuit or a requested transform.
class CircuitError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, noise model or Hamiltonian input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Simulation requests the backend cannot honour (size limits etc).
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Source-located parse failure (1-based line and column).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace vaqem
