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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pqnn/model.hpp"
#include "pqnn/simulator.hpp"

namespace pqnn {

struct TrainConfig {
  int iterations = 100;
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 1;
  std::optional<double> amplitude_cap;
  double init_scale = 0.1;
  Execution exec = Execution::kParallel;

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd first;
  Eigen::VectorXd second;

  explicit AdamState(Eigen::Index n)
      : first(Eigen::VectorXd::Zero(n)), second(Eigen::VectorXd::Zero(n)) {}
};

template <class Params>
struct TrainResult {
  Params final_params;
  std::vector<double> loss_history;  // initial loss plus one per iteration
  double wall_time = 0.0;            // seconds

  double final_loss() const { return loss_history.back(); }
};

using PulseTrainResult = TrainResult<PulseSchedule>;
using GateTrainResult = TrainResult<GateCircuit>;

double mse(std::span<const double> preds, std::span<const double> targets);

/// One bias-corrected Adam update at step t >= 1, followed by projection onto
/// [-cap, cap] when cfg.amplitude_cap is set.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads,
               AdamState& state, int t, const TrainConfig& cfg);

/// Amplitudes i.i.d. uniform in [-init_scale, init_scale] from cfg.seed,
/// drawn column by column and clipped to the cap.
PulseSchedule random_schedule(double duration, int segments, int n_controls,
                              const TrainConfig& cfg);

PulseTrainResult train_pulse(const PulseModel& model, const TrainingSet& data,
                             double duration, int segments, const Observable& m,
                             const TrainConfig& cfg);

/// Continues training from a given schedule instead of a random draw.
PulseTrainResult train_pulse_from(const PulseModel& model,
                                  const TrainingSet& data,
                                  const PulseSchedule& initial,
                                  const Observable& m, const TrainConfig& cfg);

/// Trains the 2 * n_blocks angles of the re-uploading circuit measured in
/// sigma_z.
GateTrainResult train_gate(int n_blocks, const TrainingSet& data,
                           const TrainConfig& cfg);

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

/// sum_k (|wrap(theta1_k)| + |wrap(theta2_k)|) / theta_max; z rotations are
/// free (virtual).
double gate_time_lower_bound(const GateCircuit& circuit, double theta_max);

}  // namespace pqnn
