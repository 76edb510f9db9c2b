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

#include "pqnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "pqnn/random.hpp"

namespace pqnn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Observable sigma_z() { return Observable(pauli_embed(PauliAxis::Z, 1, 1)); }

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw Error("iterations must be at least 1");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw Error("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw Error("beta2 must lie in (0, 1)");
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (!(init_scale >= 0.0)) throw Error("init_scale must be nonnegative");
  if (amplitude_cap && !(*amplitude_cap > 0.0)) {
    throw Error("amplitude_cap must be positive");
  }
}

double mse(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size()) throw Error("mse: length mismatch");
  if (preds.empty()) throw Error("mse: empty input");
  double sum = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const double r = preds[k] - targets[k];
    sum += r * r;
  }
  return sum / static_cast<double>(preds.size());
}

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads,
               AdamState& state, int t, const TrainConfig& cfg) {
  if (params.size() != grads.size() || state.first.size() != params.size() ||
      state.second.size() != params.size()) {
    throw Error("adam_step: length mismatch");
  }
  if (t < 1) throw Error("adam_step: step index starts at 1");
  state.first = cfg.beta1 * state.first + (1.0 - cfg.beta1) * grads;
  state.second =
      cfg.beta2 * state.second + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  params.array() -= cfg.learning_rate * (state.first.array() / c1) /
                    ((state.second.array() / c2).sqrt() + cfg.eps);
  if (cfg.amplitude_cap) {
    params = params.cwiseMax(-*cfg.amplitude_cap).cwiseMin(*cfg.amplitude_cap);
  }
}

PulseSchedule random_schedule(double duration, int segments, int n_controls,
                              const TrainConfig& cfg) {
  cfg.validate();
  if (segments < 1) throw Error("segment count must be positive");
  if (!(duration > 0.0)) throw Error("pulse duration must be positive");
  CounterRng rng(cfg.seed);
  Eigen::MatrixXd values(segments, n_controls);
  // Column-major draw order: all segments of control 1, then control 2, ...
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
      values(j, k) = rng.uniform(-cfg.init_scale, cfg.init_scale);
    }
  }
  if (cfg.amplitude_cap) {
    values = values.cwiseMax(-*cfg.amplitude_cap).cwiseMin(*cfg.amplitude_cap);
  }
  return PulseSchedule(duration, values, cfg.amplitude_cap);
}

PulseTrainResult train_pulse(const PulseModel& model, const TrainingSet& data,
                             double duration, int segments, const Observable& m,
                             const TrainConfig& cfg) {
  return train_pulse_from(
      model, data, random_schedule(duration, segments, model.n_controls(), cfg), m, cfg);
}

PulseTrainResult train_pulse_from(const PulseModel& model,
                                  const TrainingSet& data,
                                  const PulseSchedule& initial,
                                  const Observable& m, const TrainConfig& cfg) {
  cfg.validate();
  validate_training_set(data, model.n_inputs(), m);
  const auto start = Clock::now();
  const double duration = initial.duration();
  Eigen::MatrixXd values = initial.values();
  Eigen::Map<Eigen::VectorXd> flat(values.data(), values.size());
  AdamState state(values.size());
  PulseTrainResult result{initial, {}, 0.0};
  result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const GradientRecord record =
        loss_and_gradient(model, PulseSchedule(duration, values), data, m, cfg.exec);
    result.loss_history.push_back(record.loss);
    const Eigen::Map<const Eigen::VectorXd> grad(record.grad.data(),
                                                 record.grad.size());
    adam_step(flat, grad, state, t, cfg);
  }
  result.final_params = PulseSchedule(duration, values, cfg.amplitude_cap);
  result.loss_history.push_back(
      loss(model, result.final_params, data, m, cfg.exec));
  result.wall_time = seconds_since(start);
  return result;
}

GateTrainResult train_gate(int n_blocks, const TrainingSet& data,
                           const TrainConfig& cfg) {
  cfg.validate();
  if (n_blocks < 1) throw Error("gate circuit needs at least one block");
  const Observable m = sigma_z();
  validate_training_set(data, 1, m);
  const auto start = Clock::now();
  CounterRng rng(cfg.seed);
  Eigen::VectorXd angles(2 * n_blocks);
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    angles(i) = rng.uniform(-cfg.init_scale, cfg.init_scale);
  }
  const auto to_circuit = [n_blocks](const Eigen::VectorXd& a) {
    GateCircuit c;
    for (int b = 0; b < n_blocks; ++b) c.blocks.emplace_back(a(2 * b), a(2 * b + 1));
    return c;
  };
  AdamState state(angles.size());
  GateTrainResult result{to_circuit(angles), {}, 0.0};
  result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const GateGradient g =
        gate_loss_and_gradient(to_circuit(angles), data, m, cfg.exec);
    result.loss_history.push_back(g.loss);
    adam_step(angles, g.grad, state, t, cfg);
  }
  result.final_params = to_circuit(angles);
  result.loss_history.push_back(
      gate_loss_and_gradient(result.final_params, data, m, cfg.exec).loss);
  result.wall_time = seconds_since(start);
  return result;
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  return angle - kTwoPi * std::ceil((angle - std::numbers::pi) / kTwoPi);
}

double gate_time_lower_bound(const GateCircuit& circuit, double theta_max) {
  if (!(theta_max > 0.0)) throw Error("theta_max must be positive");
  double total = 0.0;
  for (const auto& [theta1, theta2] : circuit.blocks) {
    total += std::abs(wrap_angle(theta1)) + std::abs(wrap_angle(theta2));
  }
  return total / theta_max;
}

}  // namespace pqnn
