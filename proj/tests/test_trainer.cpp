// Copyright 2026 The pulseqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pqnn/trainer.hpp"

namespace {

using namespace pqnn;
constexpr double kPi = std::numbers::pi;

const Observable& sigma_z() {
  static const Observable z(pauli_embed(PauliAxis::Z, 1, 1));
  return z;
}

TrainingSet sigmoid_data(int n) {
  TrainingSet d;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + 2.0 * i / (n - 1);
    d.inputs.push_back({x});
    d.targets.push_back(std::tanh(5.0 * x));
  }
  return d;
}

TEST(Mse, Examples) {
  const std::vector<double> a{0.1, 0.2, 0.3};
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(mse(std::vector<double>{1, -1}, std::vector<double>{-1, 1}), 4.0);
  const std::vector<double> shifted{0.6, 0.7, 0.8};
  EXPECT_NEAR(mse(shifted, a), 0.25, 1e-15);
  EXPECT_THROW(mse(a, std::vector<double>{1.0}), Error);
  EXPECT_THROW(mse(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Adam, ZeroGradientLeavesParams) {
  TrainConfig cfg;
  Eigen::VectorXd p(3);
  p << 0.1, -0.2, 0.3;
  const Eigen::VectorXd before = p;
  AdamState st(3);
  for (int t = 1; t <= 5; ++t) adam_step(p, Eigen::VectorXd::Zero(3), st, t, cfg);
  EXPECT_EQ(p, before);
}

TEST(Adam, ConstantGradientStepsByLearningRate) {
  TrainConfig cfg;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd g(2);
  g << 3.0, -0.01;
  AdamState st(2);
  Eigen::VectorXd prev = p;
  for (int t = 1; t <= 200; ++t) {
    adam_step(p, g, st, t, cfg);
    const Eigen::VectorXd step = p - prev;
    EXPECT_NEAR(step(0), -cfg.learning_rate, 1e-6);
    EXPECT_NEAR(step(1), cfg.learning_rate, 1e-4);
    prev = p;
  }
}

TEST(Adam, MatchesScalarReference) {
  TrainConfig cfg;
  cfg.learning_rate = 0.03;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  double x = 0.4, m = 0, v = 0;
  Eigen::VectorXd p(1);
  p << x;
  AdamState st(1);
  for (int t = 1; t <= 50; ++t) {
    const double g = n(rng);
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    x -= cfg.learning_rate * (m / (1 - std::pow(cfg.beta1, t))) /
         (std::sqrt(v / (1 - std::pow(cfg.beta2, t))) + cfg.eps);
    adam_step(p, Eigen::VectorXd::Constant(1, g), st, t, cfg);
    EXPECT_NEAR(p(0), x, 1e-14);
  }
}

TEST(Adam, ProjectionClipsEveryStep) {
  TrainConfig cfg;
  cfg.learning_rate = 5.0;
  cfg.amplitude_cap = 0.1;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 10);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(10);
  AdamState st(10);
  for (int t = 1; t <= 20; ++t) {
    Eigen::VectorXd g(10);
    for (auto& v : g) v = n(rng);
    adam_step(p, g, st, t, cfg);
    EXPECT_LE(p.cwiseAbs().maxCoeff(), 0.1);
  }
}

TEST(Adam, RejectsMismatch) {
  TrainConfig cfg;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  AdamState st(2);
  EXPECT_THROW(adam_step(p, Eigen::VectorXd::Zero(3), st, 1, cfg), Error);
  EXPECT_THROW(adam_step(p, Eigen::VectorXd::Zero(2), st, 0, cfg), Error);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(TrainPulse, ConstantTargetStartsAtZeroLoss) {
  TrainingSet d;
  for (int i = 0; i < 5; ++i) {
    d.inputs.push_back({-1.0 + 0.5 * i});
    d.targets.push_back(1.0);
  }
  TrainConfig cfg;
  cfg.init_scale = 0.0;
  cfg.iterations = 3;
  const auto r = train_pulse(build_single_qubit_model(), d, 1.0, 10, sigma_z(), cfg);
  EXPECT_LT(r.loss_history.front(), 1e-24);
}

TEST(TrainPulse, HistoryDeterminismAndFinalLoss) {
  const PulseModel m = build_single_qubit_model();
  const TrainingSet d = sigmoid_data(30);
  TrainConfig cfg;
  cfg.iterations = 40;
  cfg.seed = 9;
  const auto a = train_pulse(m, d, 3.0, 30, sigma_z(), cfg);
  const auto b = train_pulse(m, d, 3.0, 30, sigma_z(), cfg);
  cfg.exec = Execution::kSerial;
  const auto c = train_pulse(m, d, 3.0, 30, sigma_z(), cfg);
  ASSERT_EQ(a.loss_history.size(), 41u);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.loss_history, c.loss_history);
  EXPECT_NEAR(a.final_loss(), loss(m, a.final_params, d, sigma_z()), 1e-12);
  EXPECT_LT(a.final_loss(), a.loss_history.front());
}

TEST(TrainPulse, CapHoldsAndMovingAverageDecreases) {
  const PulseModel m = build_single_qubit_model();
  const TrainingSet d = sigmoid_data(40);
  TrainConfig cfg;
  cfg.iterations = 120;
  cfg.amplitude_cap = 0.8;
  const auto r = train_pulse(m, d, 5.0, 50, sigma_z(), cfg);
  EXPECT_LE(r.final_params.values().cwiseAbs().maxCoeff(), 0.8);
  const auto& h = r.loss_history;
  double prev = INFINITY;
  for (std::size_t i = 0; i + 20 <= h.size(); ++i) {
    double avg = 0.0;
    for (std::size_t j = i; j < i + 20; ++j) avg += h[j] / 20.0;
    EXPECT_LE(avg, prev * (1 + 1e-12)) << "window " << i;
    prev = avg;
  }
}

TEST(TrainPulse, RejectsUnnormalizedTargets) {
  TrainingSet d{{{0.0}, {0.5}}, {0.0, 2.0}};
  try {
    train_pulse(build_single_qubit_model(), d, 1.0, 4, sigma_z(), TrainConfig{});
    FAIL() << "accepted target outside the observable range";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("normalize_targets"), std::string::npos);
  }
}

TEST(RandomSchedule, DrawsWithinScaleAndRespectsSeed) {
  TrainConfig cfg;
  cfg.init_scale = 0.3;
  cfg.seed = 4;
  const auto a = random_schedule(2.0, 8, 3, cfg);
  const auto b = random_schedule(2.0, 8, 3, cfg);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_LE(a.values().cwiseAbs().maxCoeff(), 0.3);
  cfg.seed = 5;
  EXPECT_NE(random_schedule(2.0, 8, 3, cfg).values(), a.values());
}

TEST(TrainGate, RealizableTargetIsFitExactly) {
  const GateCircuit truth{{{0.9, -0.4}}};
  TrainingSet d;
  for (int i = 0; i < 20; ++i) {
    const double x = -1.0 + 2.0 * i / 19;
    d.inputs.push_back({x});
    const Vector psi = gate_propagator(truth, x).matrix().col(0);
    d.targets.push_back(expectation(sigma_z().op().matrix(), psi));
  }
  TrainConfig cfg;
  cfg.iterations = 1500;
  cfg.learning_rate = 0.02;
  cfg.init_scale = 0.5;
  const auto r = train_gate(1, d, cfg);
  EXPECT_LT(r.final_loss(), 1e-8);
  EXPECT_EQ(r.loss_history.size(), 1501u);
}

TEST(GateTime, Examples) {
  EXPECT_EQ(gate_time_lower_bound(GateCircuit{{{0.0, 0.0}, {0.0, 0.0}}}, 1.0), 0.0);
  const double theta_max = 2 * kPi * 0.05;
  EXPECT_NEAR(gate_time_lower_bound(GateCircuit{{{kPi, kPi}}}, theta_max), 20.0, 1e-12);
  EXPECT_NEAR(gate_time_lower_bound(GateCircuit{{{2 * kPi + 0.1, 0.0}}}, theta_max),
              gate_time_lower_bound(GateCircuit{{{0.1, 0.0}}}, theta_max), 1e-12);
  EXPECT_NEAR(gate_time_lower_bound(GateCircuit{{{-0.3, 0.0}}}, 1.0), 0.3, 1e-15);
  EXPECT_THROW(gate_time_lower_bound(GateCircuit{}, 0.0), Error);
}

TEST(GateTime, WrapConvention) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(0.2 - 4 * kPi), 0.2, 1e-14);
}

}  // namespace
