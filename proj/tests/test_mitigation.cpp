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

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace vaqem {
namespace {

using testing::random_circuit;
using testing::random_config;

TimedCircuit one_window(Cycles len) {
  Circuit c{1, {Gate::single(GateKind::H, 0), Gate::delay_for(0, len), Gate::single(GateKind::H, 0)}, {}};
  return schedule_alap(c);
}

std::vector<Cycles> starts_of(const TimedCircuit& tc, GateKind k) {
  std::vector<Cycles> out;
  for (const auto& g : tc.gates)
    if (g.gate.kind == k) out.push_back(g.start);
  return out;
}

TEST(DDSequence, PulsesComposeToIdentity) {
  for (auto k : {DDKind::XX, DDKind::YY, DDKind::XY4}) {
    Matrix2 u = Matrix2::Identity();
    for (auto p : dd_pulses(k)) u = mat::single_qubit(p) * u;
    EXPECT_NEAR(std::abs(u.trace()) / 2, 1.0, 1e-15) << dd_name(k);
  }
  EXPECT_EQ(dd_pulses(DDKind::XY4), (std::vector<GateKind>{GateKind::X, GateKind::Y, GateKind::X, GateKind::Y}));
  EXPECT_EQ(dd_from_name("xy4"), DDKind::XY4);
  EXPECT_EQ(dd_from_name("YY"), DDKind::YY);
  EXPECT_FALSE(dd_from_name("XY8").has_value());
}

TEST(MaxRounds, Examples) {
  EXPECT_EQ(max_rounds(8, DDKind::XY4), 2);
  EXPECT_EQ(max_rounds(1, DDKind::XX), 0);
  EXPECT_EQ(max_rounds(799, DDKind::XX), 399);
  EXPECT_EQ(max_rounds(0, DDKind::YY), 0);
  DurationTable slow;
  slow.single_qubit = 3;
  EXPECT_EQ(max_rounds(25, DDKind::XX, slow), 4);
}

TEST(InsertDD, OffsetsExample) {
  EXPECT_EQ(dd_offsets(4, 2, 1), (std::vector<Cycles>{1, 2}));
  const auto tc = one_window(4);
  const auto w = extract_idle_windows(tc).front();
  ASSERT_EQ(w.length(), 4);
  const auto out = insert_dd(tc, w, DDKind::XX, 1);
  EXPECT_EQ(starts_of(out, GateKind::X), (std::vector<Cycles>{w.start + 1, w.start + 2}));
}

TEST(InsertDD, EvenSpacingWithinOneCycle) {
  for (Cycles len : {7, 40, 101, 800}) {
    for (int m : {1, 2, 5, 12}) {
      if (m > len) continue;
      const auto off = dd_offsets(len, m, 1);
      const double gap = static_cast<double>(len - m) / (m + 1);
      Cycles prev_end = 0;
      for (int k = 0; k < m; ++k) {
        const Cycles g = off[static_cast<std::size_t>(k)] - prev_end;
        EXPECT_GE(g, 0);
        EXPECT_LE(std::abs(static_cast<double>(off[static_cast<std::size_t>(k)]) - (k + 1) * gap - k), 0.5 + 1e-12);
        prev_end = off[static_cast<std::size_t>(k)] + 1;
      }
      EXPECT_LE(prev_end, len);
    }
  }
}

TEST(InsertDD, RangeErrors) {
  const auto tc = one_window(8);
  const auto w = extract_idle_windows(tc).front();
  EXPECT_THROW(insert_dd(tc, w, DDKind::XY4, 3), CircuitError);
  EXPECT_THROW(insert_dd(tc, w, DDKind::XY4, 0), CircuitError);
  EXPECT_NO_THROW(insert_dd(tc, w, DDKind::XY4, 2));
}

TEST(InsertDD, MaxRoundsLeavesLittleSlack) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const Cycles len = 4 + static_cast<Cycles>(rng() % 200);
    const auto kind = static_cast<DDKind>(rng() % 3);
    const auto tc = one_window(len);
    const auto w = extract_idle_windows(tc).front();
    const int r = max_rounds(w, kind);
    const int m = r * static_cast<int>(dd_pulses(kind).size());
    const auto out = insert_dd(tc, w, kind, r);
    Cycles idle = 0;
    for (const auto& iw : extract_idle_windows(out)) idle += iw.length();
    EXPECT_LT(idle, m + 1);
    EXPECT_EQ(idle, len - m);
  }
}

TEST(InsertDD, PreservesUnitary) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto tc = schedule_alap(random_circuit(n, 20, rng));
    const auto ws = extract_idle_windows(tc);
    if (ws.empty()) continue;
    const auto& w = ws[rng() % ws.size()];
    const auto kind = static_cast<DDKind>(rng() % 3);
    const int r = max_rounds(w, kind);
    if (r == 0) continue;
    const auto out = insert_dd(tc, w, kind, 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(r)));
    EXPECT_GE(trace_fidelity(unitary_of(tc), unitary_of(out)), 1 - 1e-10);
  }
}

TEST(ApplyConfig, Baselines) {
  std::mt19937_64 rng(71);
  const auto tc = schedule_alap(random_circuit(3, 30, rng, true));
  const auto ws = extract_idle_windows(tc);
  EXPECT_EQ(apply_config(tc, ws, {}), tc);
  MitigationConfig all;
  for (const auto& w : ws) all.windows.push_back({w, WindowSetting{DDKind::XX, 0, 1.0}});
  EXPECT_EQ(apply_config(tc, ws, all), tc);
}

TEST(ApplyConfig, ShiftAndDDOnEchoCircuit) {
  const auto tc = schedule_alap(spin_echo_circuit());
  const auto ws = extract_idle_windows(tc);
  ASSERT_EQ(ws.size(), 1u);
  const auto& w = ws[0];
  ASSERT_TRUE(has_movable_gate(tc, w));
  MitigationConfig cfg{{{w, WindowSetting{DDKind::XY4, 6, 0.5}}}};
  const auto out = apply_config(tc, ws, cfg);
  // the echo X moved to the middle, 24 DD pulses added around it
  EXPECT_EQ(starts_of(out, GateKind::Y).size(), 12u);
  EXPECT_EQ(starts_of(out, GateKind::X).size(), 13u);
  const auto split = split_rounds(w, 0.5, DDKind::XY4, 6);
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->first, 3);
  EXPECT_EQ(split->second, 3);
  const auto xs = starts_of(out, GateKind::X);
  EXPECT_TRUE(std::find(xs.begin(), xs.end(), shifted_start(w, 0.5)) != xs.end());
  EXPECT_GE(trace_fidelity(unitary_of(tc), unitary_of(out)), 1 - 1e-10);
}

TEST(ApplyConfig, Rejections) {
  const auto tc = schedule_alap(spin_echo_circuit());
  const auto ws = extract_idle_windows(tc);
  const auto& w = ws[0];
  auto expect_window_error = [&](const MitigationConfig& cfg, const std::string& needle) {
    try {
      apply_config(tc, ws, cfg);
      FAIL() << "expected rejection";
    } catch (const CircuitError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_window_error({{{w, WindowSetting{DDKind::XX, 1000, 1.0}}}}, "qubit 0");
  expect_window_error({{{w, WindowSetting{DDKind::XX, 1, 1.5}}}}, "fraction");
  IdleWindow bogus = w;
  bogus.start += 3;
  expect_window_error({{{bogus, WindowSetting{DDKind::XX, 1, 1.0}}}}, "unknown window");

  // a window closed by a CX has no movable gate
  Circuit c{2, {Gate::single(GateKind::H, 0), Gate::delay_for(0, 20), Gate::single(GateKind::X, 1), Gate::cx(0, 1)}, {}};
  const auto tc2 = schedule_alap(c);
  const auto ws2 = extract_idle_windows(tc2);
  ASSERT_FALSE(ws2.empty());
  MitigationConfig gs{{{ws2[0], WindowSetting{DDKind::XX, 0, 0.5}}}};
  EXPECT_THROW(apply_config(tc2, ws2, gs), CircuitError);
}

TEST(ApplyConfig, SemanticPreservation) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto c = random_circuit(n, 25, rng, trial % 2 == 0, true, true);
    const auto tc = schedule_alap(c);
    const auto ws = extract_idle_windows(tc);
    const auto out = apply_config(tc, ws, random_config(tc, ws, rng));
    const auto theta = testing::random_angles(c.parameters.size(), rng);
    EXPECT_GE(trace_fidelity(unitary_of(tc, theta), unitary_of(out, theta)), 1 - 1e-10) << "trial " << trial;
  }
}

TEST(Mem, IdealReadoutIsIdentity) {
  const auto a = mem_calibrate(3, NoiseModel::ideal());
  EXPECT_TRUE(a.isIdentity(1e-15));
}

TEST(Mem, SymmetricFlipSingleQubit) {
  auto noise = NoiseModel::defaults();
  const auto a = mem_calibrate(1, noise);
  Eigen::Matrix2d expect;
  expect << 0.98, 0.02, 0.02, 0.98;
  EXPECT_LT((a - expect).norm(), 1e-12);
}

TEST(Mem, TwoQubitsIsKronecker) {
  auto noise = NoiseModel::defaults();
  noise.qubits = {noise.qubits[0], noise.qubits[0]};
  noise.qubits[1].p01 = 0.05;
  noise.qubits[1].p10 = 0.01;
  const auto a = mem_calibrate(2, noise);
  Eigen::Matrix2d a0, a1;
  a0 << 0.98, 0.02, 0.02, 0.98;
  a1 << 0.95, 0.01, 0.05, 0.99;
  Eigen::Matrix4d expect;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) expect.block<2, 2>(2 * r, 2 * c) = a1(r, c) * a0;
  EXPECT_LT((a - expect).norm(), 1e-12);
  MemOptions t;
  t.tensored = true;
  EXPECT_LT((mem_calibrate(2, noise, t) - a).norm(), 1e-12);
}

TEST(Mem, FullMatrixNoiseIsUsed) {
  auto noise = NoiseModel::ideal();
  Eigen::MatrixXd conf(4, 4);
  conf << 0.9, 0.1, 0.0, 0.05, 0.05, 0.8, 0.1, 0.0, 0.05, 0.1, 0.8, 0.05, 0.0, 0.0, 0.1, 0.9;
  noise.confusion = conf;
  EXPECT_LT((mem_calibrate(2, noise) - conf).norm(), 1e-12);
}

TEST(Mem, PrepNoiseVariantSeesGateErrors) {
  auto noise = NoiseModel::defaults();
  noise.p_1q = 0.1;
  MemOptions opts;
  opts.prep_noise = true;
  const auto a = mem_calibrate(1, noise, opts);
  EXPECT_LT(a(1, 1), 0.98 - 0.01);
  EXPECT_NEAR(a.col(1).sum(), 1.0, 1e-12);
}

TEST(Mem, RejectsTooManyQubits) {
  EXPECT_THROW(mem_calibrate(7, NoiseModel::ideal()), ConfigError);
  MemOptions t;
  t.tensored = true;
  EXPECT_EQ(mem_calibrate(7, NoiseModel::ideal(), t).rows(), 128);
}

TEST(Mem, CorrectionExamples) {
  CountsDistribution raw{2, {0.1, 0.2, 0.3, 0.4}, 0};
  const auto same = mem_correct(raw, Eigen::MatrixXd::Identity(4, 4));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(same.probs[i], raw.probs[i], 1e-15);

  std::mt19937_64 rng(79);
  auto noise = NoiseModel::defaults();
  const auto a = mem_calibrate(2, noise);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(4);
    double s = 0;
    for (auto& x : p) s += (x = std::uniform_real_distribution<double>(0, 1)(rng));
    for (auto& x : p) x /= s;
    const Eigen::Map<const Eigen::VectorXd> pv(p.data(), 4);
    const Eigen::VectorXd q = a * pv;
    const CountsDistribution observed{2, {q(0), q(1), q(2), q(3)}, 0};
    const auto fixed = mem_correct(observed, a);
    EXPECT_LT(total_variation(fixed, CountsDistribution{2, p, 0}), 1e-9);
  }
}

TEST(Mem, SampledCorrection) {
  const auto noise = NoiseModel::defaults();
  const auto check = mem_check(2, noise, 65536, 3);
  EXPECT_LT(check.tv_after, 0.02);
  EXPECT_LT(check.tv_after, check.tv_before);
  const auto exact = mem_check(2, noise, 0, 3);
  EXPECT_LT(exact.tv_after, 1e-9);
  EXPECT_GT(exact.tv_before, 0.01);
  const auto ideal = mem_check(2, NoiseModel::ideal(), 0, 3);
  EXPECT_NEAR(ideal.tv_before, 0.0, 1e-12);
  EXPECT_NEAR(ideal.tv_after, 0.0, 1e-12);
}

TEST(Mem, SingularMatrixFallsBack) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  std::vector<std::string> warnings;
  const auto out = mem_correct(CountsDistribution{1, {0.5, 0.5}, 0}, a, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NEAR(out.total(), 1.0, 1e-12);
}

TEST(Mem, ClipsNegativeEntries) {
  Eigen::Matrix2d a;
  a << 0.9, 0.1, 0.1, 0.9;
  const auto out = mem_correct(CountsDistribution{1, {1.0, 0.0}, 100}, a);
  EXPECT_EQ(out.probs[1], 0.0);
  EXPECT_EQ(out.probs[0], 1.0);
  EXPECT_EQ(out.shots, 100u);
}

TEST(DDSweep, ZeroNoiseIsFlat) {
  const auto curve = dd_sweep(NoiseModel::ideal(), DDKind::XY4);
  ASSERT_EQ(curve.samples.size(), static_cast<std::size_t>(max_rounds(curve.window, DDKind::XY4) + 1));
  for (const auto& s : curve.samples) EXPECT_NEAR(s.fidelity, 1.0, 1e-12);
  EXPECT_EQ(curve.argmax, 0u);
}

TEST(DDSweep, GateErrorOnlyIsNonIncreasing) {
  auto noise = NoiseModel::ideal();
  noise.p_1q = 1e-3;
  for (auto kind : {DDKind::XX, DDKind::XY4}) {
    const auto curve = dd_sweep(noise, kind);
    for (std::size_t i = 1; i < curve.samples.size(); ++i) {
      EXPECT_LE(curve.samples[i].fidelity, curve.samples[i - 1].fidelity + 1e-12);
    }
  }
}

TEST(DDSweep, DefaultNoiseIsNonMonotone) {
  const auto curve = dd_sweep(NoiseModel::defaults(), DDKind::XY4);
  const double f0 = curve.samples.front().fidelity;
  EXPECT_GT(curve.argmax, 0u);
  EXPECT_GT(curve.samples[curve.argmax].fidelity, f0);
  EXPECT_TRUE(std::any_of(curve.samples.begin(), curve.samples.end(),
                          [&](const SweepSample& s) { return s.fidelity < f0; }));
}

TEST(DDSweep, XY4AtLeastXX) {
  const auto xy4 = dd_sweep(NoiseModel::defaults(), DDKind::XY4);
  const auto xx = dd_sweep(NoiseModel::defaults(), DDKind::XX);
  EXPECT_GE(xy4.samples[xy4.argmax].fidelity, xx.samples[xx.argmax].fidelity - 1e-6);
}

}  // namespace
}  // namespace vaqem
