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

// Propagation of the piecewise-constant controlled Schrodinger equation and
// exact MSE gradients with respect to every segment amplitude.
//
// The production kernels run samples in parallel (OpenMP) and reduce in a
// fixed chunk order, so results do not depend on the worker count. The
// `reference` namespace holds the literal serial formulation (one matrix
// exponential per segment, one block exponential per derivative) that the
// test suite and benchmark compare against.

#pragma once

#include <span>
#include <vector>

#include "pqnn/linalg.hpp"
#include "pqnn/model.hpp"

namespace pqnn {

enum class Execution { kSerial, kParallel };

/// Inputs x^(k) (each of model arity m) with targets y^(k).
struct TrainingSet {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;

  std::size_t size() const { return inputs.size(); }
};

struct Prediction {
  std::vector<double> x;
  double value;
  QuantumState final_state;
};

struct GradientRecord {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // segments x controls
};

QuantumState evolve(const PulseModel& model, const PulseSchedule& schedule,
                    std::span<const double> x);

Prediction predict(const PulseModel& model, const PulseSchedule& schedule,
                   std::span<const double> x, const Observable& m);

std::vector<Prediction> predict_batch(
    const PulseModel& model, const PulseSchedule& schedule,
    const std::vector<std::vector<double>>& xs, const Observable& m,
    Execution exec = Execution::kParallel);

/// Mean squared error only (forward sweeps).
double loss(const PulseModel& model, const PulseSchedule& schedule,
            const TrainingSet& data, const Observable& m,
            Execution exec = Execution::kParallel);

/// Loss and its exact gradient by a forward/backward costate sweep.
GradientRecord loss_and_gradient(const PulseModel& model,
                                 const PulseSchedule& schedule,
                                 const TrainingSet& data, const Observable& m,
                                 Execution exec = Execution::kParallel);

/// Central differences of `loss`, one pair of sweeps per amplitude.
GradientRecord finite_difference_gradient(const PulseModel& model,
                                          const PulseSchedule& schedule,
                                          const TrainingSet& data,
                                          const Observable& m, double step);

/// Loss and gradient of the gate re-uploading circuit; gradient entries are
/// ordered (theta1_1, theta2_1, theta1_2, theta2_2, ...).
struct GateGradient {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

GateGradient gate_loss_and_gradient(const GateCircuit& circuit,
                                    const TrainingSet& data,
                                    const Observable& m,
                                    Execution exec = Execution::kParallel);

/// Checks sample arity and that every target lies in the observable range.
void validate_training_set(const TrainingSet& data, int n_inputs,
                           const Observable& m);

namespace reference {

QuantumState evolve(const PulseModel& model, const PulseSchedule& schedule,
                    std::span<const double> x);

GradientRecord loss_and_gradient(const PulseModel& model,
                                 const PulseSchedule& schedule,
                                 const TrainingSet& data, const Observable& m);

}  // namespace reference

}  // namespace pqnn
