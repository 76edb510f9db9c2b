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

#include <algorithm>
#include <chrono>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pqnn/simulator.hpp"

namespace {

using namespace pqnn;
constexpr double kPi = std::numbers::pi;

std::vector<oracle::Mat> mats(const std::vector<HermitianOperator>& ops) {
  std::vector<oracle::Mat> out;
  for (const auto& op : ops) out.push_back(op.matrix());
  return out;
}

Eigen::MatrixXd random_values(int k, int p, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd v(k, p);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
  return v;
}

TrainingSet random_data(int n, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  TrainingSet d;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(m));
    for (auto& v : x) v = u(rng);
    d.inputs.push_back(x);
    d.targets.push_back(u(rng));
  }
  return d;
}

const Observable& sigma_z() {
  static const Observable z(pauli_embed(PauliAxis::Z, 1, 1));
  return z;
}

TEST(Evolve, ZeroScheduleKeepsInitialState) {
  const PulseModel m = build_single_qubit_model();
  const QuantumState psi = evolve(m, PulseSchedule::zeros(3.0, 10, 2), std::vector<double>{0.0});
  EXPECT_LT((psi.amplitudes() - m.initial_state().amplitudes()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(predict(m, PulseSchedule::zeros(3.0, 10, 2), std::vector<double>{0.0},
                           sigma_z()).value,
                   1.0);
}

TEST(Evolve, RabiPiPulse) {
  const PulseModel m = build_single_qubit_model();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(5, 2);
  v.col(0).setConstant(kPi / 2 / 2.0);  // theta1 * T = pi / 2 with T = 2
  const PulseSchedule s(2.0, v);
  const QuantumState psi = evolve(m, s, std::vector<double>{0.0});
  EXPECT_LT(std::abs(psi.amplitudes()(1) - cplx(0, -1)), 1e-12);
  EXPECT_NEAR(predict(m, s, std::vector<double>{0.0}, sigma_z()).value, -1.0, 1e-12);
}

TEST(Evolve, MatchesOracleAndPreservesNorm) {
  std::mt19937_64 rng(41);
  const PulseModel models[] = {build_single_qubit_model(), build_bivariate_model(),
                               build_circular_model(2), build_circular_model(3)};
  for (const auto& m : models) {
    for (int trial = 0; trial < 5; ++trial) {
      const PulseSchedule s(2.5, random_values(7, m.n_controls(), rng));
      std::vector<double> x(static_cast<std::size_t>(m.n_inputs()));
      for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng);
      const QuantumState psi = evolve(m, s, x);
      EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-10);
      const auto expected = oracle::evolve(mats(m.encoders()), mats(m.controls()), s.values(),
                                           s.duration(), x, m.initial_state().amplitudes());
      EXPECT_LT((psi.amplitudes() - expected).norm(), 1e-10);
      EXPECT_LT((reference::evolve(m, s, x).amplitudes() - expected).norm(), 1e-10);
    }
  }
}

TEST(Evolve, ArityMismatch) {
  const PulseModel m = build_bivariate_model();
  EXPECT_THROW(evolve(m, PulseSchedule::zeros(1.0, 2, 2), std::vector<double>{0.1}), Error);
  EXPECT_THROW(evolve(m, PulseSchedule::zeros(1.0, 2, 3), std::vector<double>{0.1, 0.2}), Error);
}

TEST(Evolve, RefinementIsExact) {
  std::mt19937_64 rng(43);
  const PulseModel m = build_circular_model(2);
  const PulseSchedule s(1.7, random_values(6, 5, rng));
  const std::vector<double> x{0.4};
  const Vector a = evolve(m, s, x).amplitudes();
  const Vector b = evolve(m, s.refined(2), x).amplitudes();
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(Evolve, RescalingInvariance) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  const PulseModel m = build_single_qubit_model();
  for (int trial = 0; trial < 20; ++trial) {
    const PulseSchedule s(3.0, random_values(9, 2, rng));
    const double r = radius(rng);
    const double x = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double xr = x / r;
    const double a = predict(m, s, std::vector<double>{x}, sigma_z()).value;
    const double b = predict(m, rescale_schedule(s, r), std::vector<double>{xr}, sigma_z()).value;
    EXPECT_NEAR(a, b, 1e-9);
  }
}

TEST(PredictBatch, OrderAndDeterminism) {
  std::mt19937_64 rng(53);
  const PulseModel m = build_single_qubit_model();
  const PulseSchedule s(2.0, random_values(20, 2, rng));
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < 200; ++i) xs.push_back({-1.0 + 2.0 * i / 199});
  const auto par = predict_batch(m, s, xs, sigma_z(), Execution::kParallel);
  const auto ser = predict_batch(m, s, xs, sigma_z(), Execution::kSerial);
  ASSERT_EQ(par.size(), 200u);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(par[i].value, ser[i].value);
    EXPECT_EQ(par[i].x, xs[i]);
    EXPECT_LE(std::abs(par[i].value), 1.0 + 1e-12);
  }
  auto reversed = xs;
  std::reverse(reversed.begin(), reversed.end());
  const auto rev = predict_batch(m, s, reversed, sigma_z());
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(rev[i].value, par[xs.size() - 1 - i].value);
  const auto single = predict_batch(m, s, {xs[3]}, sigma_z());
  EXPECT_EQ(single[0].value, predict(m, s, xs[3], sigma_z()).value);
  EXPECT_THROW(predict_batch(m, s, {}, sigma_z()), Error);
}

TEST(Gradient, ZeroAtPerfectFit) {
  std::mt19937_64 rng(59);
  const PulseModel m = build_single_qubit_model();
  const PulseSchedule s(2.0, random_values(6, 2, rng));
  TrainingSet d = random_data(8, 1, rng);
  for (std::size_t i = 0; i < d.size(); ++i) d.targets[i] = predict(m, s, d.inputs[i], sigma_z()).value;
  const GradientRecord g = loss_and_gradient(m, s, d, sigma_z());
  EXPECT_LT(g.loss, 1e-24);
  EXPECT_LT(g.grad.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(finite_difference_gradient(m, s, d, sigma_z(), 1e-5).grad.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Gradient, SingleSegmentAgainstFiniteDifference) {
  const PulseModel m = build_single_qubit_model();
  Eigen::MatrixXd v(1, 2);
  v << 0.3, -0.7;
  const PulseSchedule s(1.3, v);
  const TrainingSet d{{{0.4}}, {0.2}};
  const GradientRecord g = loss_and_gradient(m, s, d, sigma_z());
  const Eigen::MatrixXd fd = oracle::mse_gradient(mats(m.encoders()), mats(m.controls()), v, 1.3,
                                                  d.inputs, d.targets, sigma_z().op().matrix(),
                                                  m.initial_state().amplitudes(), 1e-6);
  EXPECT_LT((g.grad - fd).norm() / fd.norm(), 1e-6);
}

TEST(Gradient, AllModelsAgainstOracleAndReference) {
  std::mt19937_64 rng(61);
  const PulseModel models[] = {build_single_qubit_model(), build_bivariate_model(),
                               build_circular_model(2), build_circular_model(3)};
  for (const auto& m : models) {
    const Observable obs(pauli_embed(PauliAxis::Z, 1, m.n_qubits()));
    for (int trial = 0; trial < 3; ++trial) {
      const PulseSchedule s(2.0, random_values(5, m.n_controls(), rng));
      const TrainingSet d = random_data(4, m.n_inputs(), rng);
      const GradientRecord g = loss_and_gradient(m, s, d, obs);
      const GradientRecord serial = loss_and_gradient(m, s, d, obs, Execution::kSerial);
      const GradientRecord ref = reference::loss_and_gradient(m, s, d, obs);
      const Eigen::MatrixXd fd = oracle::mse_gradient(
          mats(m.encoders()), mats(m.controls()), s.values(), s.duration(), d.inputs, d.targets,
          obs.op().matrix(), m.initial_state().amplitudes(), 1e-6);
      EXPECT_LT((g.grad - fd).norm() / fd.norm(), 1e-6);
      EXPECT_LT((g.grad - ref.grad).norm() / ref.grad.norm(), 1e-12);
      EXPECT_EQ(g.loss, serial.loss);
      EXPECT_EQ(g.grad, serial.grad);
      EXPECT_NEAR(g.loss, ref.loss, 1e-14);
    }
  }
}

TEST(Gradient, FiniteDifferenceStepSensitivity) {
  std::mt19937_64 rng(67);
  const PulseModel m = build_single_qubit_model();
  const PulseSchedule s(2.0, random_values(4, 2, rng));
  const TrainingSet d = random_data(5, 1, rng);
  const auto a = finite_difference_gradient(m, s, d, sigma_z(), 1e-5).grad;
  const auto b = finite_difference_gradient(m, s, d, sigma_z(), 1e-6).grad;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Gradient, RejectsBadData) {
  const PulseModel m = build_single_qubit_model();
  const PulseSchedule s = PulseSchedule::zeros(1.0, 2, 2);
  EXPECT_THROW(loss_and_gradient(m, s, TrainingSet{}, sigma_z()), Error);
  try {
    loss_and_gradient(m, s, TrainingSet{{{0.0}}, {3.0}}, sigma_z());
    FAIL() << "out-of-range target accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("normalize_targets"), std::string::npos);
  }
}

TEST(Gradient, LargeSingleQubitProblemIsFast) {
  std::mt19937_64 rng(71);
  const PulseModel m = build_single_qubit_model();
  const PulseSchedule s(10.0, random_values(1000, 2, rng, 0.1));
  TrainingSet d;
  for (int i = 0; i < 200; ++i) {
    d.inputs.push_back({-1.0 + 2.0 * i / 199});
    d.targets.push_back(0.0);
  }
  const auto start = std::chrono::steady_clock::now();
  const GradientRecord g = loss_and_gradient(m, s, d, sigma_z());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(g.grad.rows(), 1000);
  EXPECT_LT(seconds, 1.0);
}

TEST(GateGradient, MatchesFiniteDifference) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  GateCircuit c;
  for (int b = 0; b < 4; ++b) c.blocks.emplace_back(u(rng), u(rng));
  const TrainingSet d = random_data(6, 1, rng);
  const GateGradient g = gate_loss_and_gradient(c, d, sigma_z());
  const auto loss_of = [&](const GateCircuit& circ) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const Vector psi = gate_propagator(circ, d.inputs[k][0]).matrix().col(0);
      const double r = oracle::expect(sigma_z().op().matrix(), psi) - d.targets[k];
      sum += r * r;
    }
    return sum / static_cast<double>(d.size());
  };
  EXPECT_NEAR(g.loss, loss_of(c), 1e-14);
  for (int i = 0; i < 8; ++i) {
    GateCircuit up = c, down = c;
    auto& a = i % 2 == 0 ? up.blocks[i / 2].first : up.blocks[i / 2].second;
    auto& b = i % 2 == 0 ? down.blocks[i / 2].first : down.blocks[i / 2].second;
    a += 1e-6;
    b -= 1e-6;
    EXPECT_NEAR(g.grad(i), (loss_of(up) - loss_of(down)) / 2e-6, 1e-7);
  }
}

}  // namespace
