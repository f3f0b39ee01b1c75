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
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vaqem/common.hpp"

namespace vaqem {

/// SPSA gains a_k = a / (k + 1 + A)^alpha and c_k = c / (k + 1)^gamma.
/// a <= 0 calibrates a from the objective so the first step moves each angle
/// by about `target_step` radians; A < 0 means 0.1 * max_iters.
struct SpsaSettings {
  double a = 0.0;
  double c = 0.1;
  double A = -1.0;
  double alpha = 0.602;
  double gamma = 0.101;
  int max_iters = 200;
  std::uint64_t seed = 1;
  double target_step = 0.1;
  int calibration_samples = 25;
  // Gradient estimates averaged per iteration.
  int resamplings = 1;
  // Reject an update whose objective rises by more than `blocking_tolerance`.
  bool blocking = false;
  double blocking_tolerance = 0.0;

  void validate() const {
    if (!(c > 0)) throw ConfigError("SPSA c must be positive");
    if (!(alpha > 0 && alpha <= 1) || !(gamma > 0 && gamma <= 1)) {
      throw ConfigError("SPSA alpha and gamma must lie in (0, 1]");
    }
    if (max_iters < 0) throw ConfigError("SPSA max_iters must be non-negative");
    if (resamplings < 1) throw ConfigError("SPSA resamplings must be at least 1");
    if (a <= 0 && !(target_step > 0)) throw ConfigError("SPSA needs a > 0 or a positive target_step");
  }
};

struct SpsaIteration {
  double value = 0.0;
  std::uint64_t params_hash = 0;
};

struct TuneTrace {
  std::vector<SpsaIteration> iterations;  // entry 0 is the starting point
  std::vector<double> best_params;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  double gain_a = 0.0;  // the a actually used (after calibration)
  bool aborted = false;
  std::string abort_reason;
};

/// FNV-1a over the IEEE bytes of a parameter vector.
inline std::uint64_t hash_params(std::span<const double> v) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double x : v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof x);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double t) {
  double r = std::remainder(t, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

using Objective = std::function<double(std::span<const double>)>;

/// Simultaneous perturbation stochastic approximation. Each step draws a
/// Rademacher direction, estimates the gradient from two evaluations and
/// takes a gain-scheduled step; the objective at the new point is recorded.
/// Returns the best point seen, not the last one.
inline TuneTrace spsa_minimize(const Objective& f, std::vector<double> theta, const SpsaSettings& s) {
  s.validate();
  for (double t : theta) {
    if (!std::isfinite(t)) throw ConfigError("SPSA start point must be finite");
  }
  const std::size_t d = theta.size();
  std::mt19937_64 rng(s.seed);
  std::bernoulli_distribution coin(0.5);
  auto direction = [&] {
    std::vector<double> delta(d);
    for (auto& x : delta) x = coin(rng) ? 1.0 : -1.0;
    return delta;
  };
  auto shifted = [&](const std::vector<double>& base, const std::vector<double>& delta, double scale) {
    std::vector<double> out(base);
    for (std::size_t i = 0; i < d; ++i) out[i] += scale * delta[i];
    return out;
  };

  TuneTrace trace;
  auto eval = [&](const std::vector<double>& x) {
    ++trace.evaluations;
    return f(x);
  };
  auto abort_with = [&](const std::string& why) {
    trace.aborted = true;
    trace.abort_reason = why;
    return trace;
  };

  double current = eval(theta);
  if (!std::isfinite(current)) return abort_with("objective is not finite at the start point");
  trace.iterations.push_back({current, hash_params(theta)});
  trace.best_params = theta;
  trace.best_value = current;

  const double big_a = s.A >= 0 ? s.A : 0.1 * s.max_iters;
  double a = s.a;
  if (a <= 0) {
    double mag = 0;
    for (int i = 0; i < s.calibration_samples; ++i) {
      const auto delta = direction();
      const double fp = eval(shifted(theta, delta, s.c));
      const double fm = eval(shifted(theta, delta, -s.c));
      if (!std::isfinite(fp) || !std::isfinite(fm)) return abort_with("objective is not finite during calibration");
      mag += std::abs(fp - fm) / (2 * s.c);
    }
    mag /= std::max(1, s.calibration_samples);
    a = mag > 0 ? s.target_step * std::pow(big_a + 1, s.alpha) / mag : s.target_step;
  }
  trace.gain_a = a;
  const auto non_finite = [](int k) { return "objective is not finite at iteration " + std::to_string(k); };

  for (int k = 0; k < s.max_iters; ++k) {
    const double ak = a / std::pow(k + 1 + big_a, s.alpha);
    const double ck = s.c / std::pow(k + 1, s.gamma);
    std::vector<double> grad(d, 0.0);
    for (int r = 0; r < s.resamplings; ++r) {
      const auto delta = direction();
      const double fp = eval(shifted(theta, delta, ck));
      const double fm = eval(shifted(theta, delta, -ck));
      if (!std::isfinite(fp) || !std::isfinite(fm)) return abort_with(non_finite(k));
      const double slope = (fp - fm) / (2 * ck);
      for (std::size_t i = 0; i < d; ++i) grad[i] += slope / delta[i] / s.resamplings;
    }
    std::vector<double> next(d);
    for (std::size_t i = 0; i < d; ++i) next[i] = wrap_angle(theta[i] - ak * grad[i]);
    const double value = eval(next);
    if (!std::isfinite(value)) return abort_with(non_finite(k));
    if (!(s.blocking && value > current + s.blocking_tolerance)) {
      theta = std::move(next);
      current = value;
    }
    trace.iterations.push_back({current, hash_params(theta)});
    if (current < trace.best_value) {
      trace.best_value = current;
      trace.best_params = theta;
    }
  }
  return trace;
}

}  // namespace vaqem
