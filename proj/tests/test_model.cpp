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

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pqnn/model.hpp"

namespace {

using namespace pqnn;
constexpr double kPi = std::numbers::pi;

Matrix h_at(const PulseModel& m, std::vector<double> x, std::vector<double> theta) {
  return total_hamiltonian(m, x, theta).matrix();
}

TEST(Builders, SingleQubit) {
  const PulseModel m = build_single_qubit_model();
  EXPECT_EQ(m.n_inputs(), 1);
  EXPECT_EQ(m.n_controls(), 2);
  EXPECT_EQ(m.dim(), 2);
  EXPECT_EQ(m.initial_state().amplitudes(), QuantumState::basis(2, 0).amplitudes());
  EXPECT_EQ(h_at(m, {0.0}, {0.0, 0.0}), Matrix::Zero(2, 2));
  const Matrix h = h_at(m, {1.0}, {2.0, 3.0});
  EXPECT_EQ(h, oracle::pauli('z') + 2.0 * oracle::pauli('x') + 3.0 * oracle::pauli('y'));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  EXPECT_NEAR(es.eigenvalues()(0), -std::sqrt(14.0), 1e-13);
  EXPECT_NEAR(es.eigenvalues()(1), std::sqrt(14.0), 1e-13);
}

TEST(Builders, Bivariate) {
  const PulseModel m = build_bivariate_model();
  EXPECT_EQ(m.n_inputs(), 2);
  EXPECT_EQ(m.n_controls(), 2);
  EXPECT_EQ(m.dim(), 2);
  EXPECT_EQ(h_at(m, {0.0, 0.0}, {0.0, 0.0}), Matrix::Zero(2, 2));
  EXPECT_EQ(h_at(m, {1.0, 0.0}, {1.0, 0.0}), 2.0 * oracle::pauli('x'));
}

TEST(Builders, CircularOneEqualsSingleQubit) {
  const PulseModel c = build_circular_model(1);
  const PulseModel s = build_single_qubit_model();
  ASSERT_EQ(c.n_controls(), 2);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(c.controls()[k].matrix(), s.controls()[k].matrix());
  EXPECT_EQ(c.encoders()[0].matrix(), s.encoders()[0].matrix());
}

TEST(Builders, CircularTwoHasSingleCoupling) {
  const PulseModel m = build_circular_model(2);
  EXPECT_EQ(m.dim(), 4);
  EXPECT_EQ(m.n_controls(), 5);
  const Matrix zz = oracle::kron(oracle::pauli('z'), oracle::pauli('z'));
  int couplings = 0;
  for (const auto& h : m.controls()) couplings += h.matrix() == zz;
  EXPECT_EQ(couplings, 1);
  EXPECT_EQ(h_at(m, {0.5}, std::vector<double>(5, 0.0)),
            0.5 * (oracle::embed('z', 1, 2) + oracle::embed('z', 2, 2)));
}

TEST(Builders, CircularThreeAndFour) {
  EXPECT_EQ(build_circular_model(3).n_controls(), 9);
  EXPECT_EQ(build_circular_model(3).dim(), 8);
  const PulseModel m = build_circular_model(4);
  EXPECT_EQ(m.n_controls(), 12);
  // The ring closes: Z4 Z1 is among the controls.
  const Matrix z41 = oracle::embed('z', 4, 4) * oracle::embed('z', 1, 4);
  bool found = false;
  for (const auto& h : m.controls()) found = found || h.matrix() == z41;
  EXPECT_TRUE(found);
  EXPECT_THROW(build_circular_model(0), Error);
}

TEST(TotalHamiltonian, LinearAndArityChecked) {
  const PulseModel m = build_circular_model(2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x1{u(rng)}, x2{u(rng)}, t1(5), t2(5);
    for (auto& v : t1) v = u(rng);
    for (auto& v : t2) v = u(rng);
    const double a = u(rng);
    std::vector<double> xs{x1[0] + a * x2[0]}, ts(5);
    for (int k = 0; k < 5; ++k) ts[k] = t1[k] + a * t2[k];
    const Matrix lhs = h_at(m, xs, ts);
    const Matrix rhs = h_at(m, x1, t1) + a * h_at(m, x2, t2);
    EXPECT_LT(max_abs(lhs - rhs), 1e-13);
  }
  EXPECT_THROW(total_hamiltonian(m, std::vector<double>{1.0, 2.0}, std::vector<double>(5, 0.0)),
               Error);
  EXPECT_THROW(total_hamiltonian(m, std::vector<double>{1.0}, std::vector<double>(3, 0.0)), Error);
}

TEST(Schedule, Invariants) {
  EXPECT_THROW(PulseSchedule(0.0, Eigen::MatrixXd::Zero(2, 2)), Error);
  EXPECT_THROW(PulseSchedule(1.0, Eigen::MatrixXd::Zero(0, 2)), Error);
  EXPECT_THROW(PulseSchedule(1.0, Eigen::MatrixXd::Constant(2, 2, 0.5), 0.1), Error);
  const PulseSchedule s(10.0, Eigen::MatrixXd::Zero(1000, 2));
  EXPECT_DOUBLE_EQ(s.dt(), 0.01);
}

TEST(Rescale, IdentityDoublingAndInverse) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd v(4, 2);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
  const PulseSchedule s(10.0, v);
  const PulseSchedule same = rescale_schedule(s, 1.0);
  EXPECT_EQ(same.duration(), 10.0);
  EXPECT_EQ(same.values(), v);
  const PulseSchedule doubled = rescale_schedule(s, 2.0);
  EXPECT_EQ(doubled.duration(), 20.0);
  EXPECT_EQ(doubled.segments(), 4);
  EXPECT_EQ(doubled.values(), v / 2.0);
  const PulseSchedule back = rescale_schedule(doubled, 0.5);
  EXPECT_EQ(back.duration(), s.duration());
  EXPECT_EQ(back.values(), s.values());
  EXPECT_THROW(rescale_schedule(s, 0.0), Error);
  EXPECT_THROW(rescale_schedule(s, -1.0), Error);
}

TEST(GatePropagator, Examples) {
  EXPECT_EQ(gate_propagator(GateCircuit{}, 0.3).matrix(), Matrix::Identity(2, 2));
  const auto u = gate_propagator(GateCircuit{{{0.0, 0.0}}}, kPi);
  EXPECT_LT(max_abs(u.matrix() + Matrix::Identity(2, 2)), 1e-14);
  const auto v = gate_propagator(GateCircuit{{{kPi / 2, 0.0}}}, 0.0);
  EXPECT_LT(max_abs(v.matrix() - cplx(0, -1) * oracle::pauli('x')), 1e-14);
}

TEST(GatePropagator, MatchesRotationProductOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  GateCircuit c;
  Matrix expected = Matrix::Identity(2, 2);
  const double x = 0.37;
  for (int b = 0; b < 4; ++b) {
    const double t1 = u(rng), t2 = u(rng);
    c.blocks.emplace_back(t1, t2);
    expected = oracle::propagator(oracle::pauli('y'), t2) * oracle::propagator(oracle::pauli('x'), t1) *
               oracle::propagator(oracle::pauli('z'), x) * expected;
  }
  EXPECT_LT(max_abs(gate_propagator(c, x).matrix() - expected), 1e-12);
}

TEST(Trotter, Examples) {
  EXPECT_LT(trotter_gap(0.0, 0.0, 0.8, 0.1), 1e-15);
  const double g = trotter_gap(1.0, 0.0, 1.0, 0.01);
  EXPECT_GT(g, 0.0);
  EXPECT_LT(g, 1e-3);
  const double ratio = trotter_gap(1, 1, 1, 0.02) / trotter_gap(1, 1, 1, 0.01);
  EXPECT_NEAR(ratio, 4.0, 0.1);
}

TEST(Trotter, SecondOrderPerStep) {
  std::vector<double> dts{0.1, 0.05, 0.025, 0.0125}, gaps;
  for (double dt : dts) gaps.push_back(trotter_gap(1.0, 1.0, 1.0, dt));
  EXPECT_NEAR(oracle::loglog_slope(dts, gaps), 2.0, 0.1);
}

TEST(PauliSum, Parses) {
  const Matrix zz = parse_pauli_sum("0.5*ZZ1 + X2", 2).matrix();
  const Matrix expected = 0.5 * oracle::kron(oracle::pauli('z'), oracle::pauli('z')) +
                          oracle::embed('x', 2, 2);
  EXPECT_LT(max_abs(zz - expected), 1e-15);
  EXPECT_LT(max_abs(parse_pauli_sum("Z1Z2", 2).matrix() -
                    oracle::kron(oracle::pauli('z'), oracle::pauli('z'))),
            1e-15);
  EXPECT_LT(max_abs(parse_pauli_sum("-Y3", 3).matrix() + oracle::embed('y', 3, 3)), 1e-15);
  EXPECT_LT(max_abs(parse_pauli_sum("I", 2).matrix() - Matrix::Identity(4, 4)), 1e-15);
  EXPECT_THROW(parse_pauli_sum("Z3", 2), Error);
  EXPECT_THROW(parse_pauli_sum("Z1Z1", 2), Error);
  EXPECT_THROW(parse_pauli_sum("Q1", 2), Error);
  EXPECT_THROW(parse_pauli_sum("", 2), Error);
}

TEST(ModelJson, PresetsAndExplicit) {
  EXPECT_EQ(model_from_json("circular:3").n_controls(), 9);
  EXPECT_EQ(model_from_json(nlohmann::json{{"preset", "bivariate"}}).n_inputs(), 2);
  const PulseModel m = model_from_json(
      {{"n_qubits", 1}, {"encoders", {"Z1"}}, {"controls", {"X1"}}, {"initial_state", "1"}});
  EXPECT_EQ(m.n_controls(), 1);
  EXPECT_EQ(m.initial_state().amplitudes(), QuantumState::basis(2, 1).amplitudes());
  EXPECT_THROW(model_from_json("circular:0"), Error);
  EXPECT_THROW(model_from_json("unknown"), Error);
  EXPECT_THROW(model_from_json({{"n_qubits", 2}, {"encoders", {"Z3"}}, {"controls", {"X1"}}}), Error);
}

}  // namespace
