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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pqnn/linalg.hpp"

namespace pqnn {

/// Maximum drive amplitude 2*pi x 50 MHz, in rad/ns.
inline constexpr double kPhysicalAmplitudeCap = 2.0 * 3.14159265358979323846 * 0.05;

/// Driven system  H(x, theta) = sum_j x_j D_j + sum_k theta_k H_k.
///
/// The encoders D_j carry the data, the controls H_k carry the trainable
/// amplitudes. All operators act on n_qubits qubits.
class PulseModel {
 public:
  PulseModel(int n_qubits, std::vector<HermitianOperator> encoders,
             std::vector<HermitianOperator> controls,
             std::vector<std::string> encoder_labels = {},
             std::vector<std::string> control_labels = {},
             std::optional<QuantumState> initial_state = std::nullopt);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return 1 << n_qubits_; }
  int n_inputs() const { return static_cast<int>(encoders_.size()); }
  int n_controls() const { return static_cast<int>(controls_.size()); }

  const std::vector<HermitianOperator>& encoders() const { return encoders_; }
  const std::vector<HermitianOperator>& controls() const { return controls_; }
  const std::vector<std::string>& encoder_labels() const {
    return encoder_labels_;
  }
  const std::vector<std::string>& control_labels() const {
    return control_labels_;
  }
  const QuantumState& initial_state() const { return initial_state_; }

  /// Same operators, with only the listed controls kept (0-based indices).
  PulseModel with_controls(const std::vector<int>& keep) const;

 private:
  int n_qubits_;
  std::vector<HermitianOperator> encoders_;
  std::vector<HermitianOperator> controls_;
  std::vector<std::string> encoder_labels_;
  std::vector<std::string> control_labels_;
  QuantumState initial_state_;
};

/// Piecewise-constant amplitudes: `values(j, k)` is theta_k on segment j.
class PulseSchedule {
 public:
  PulseSchedule(double duration, Eigen::MatrixXd values,
                std::optional<double> amplitude_cap = std::nullopt);

  static PulseSchedule zeros(double duration, int segments, int n_controls);

  double duration() const { return duration_; }
  int segments() const { return static_cast<int>(values_.rows()); }
  int n_controls() const { return static_cast<int>(values_.cols()); }
  double dt() const { return duration_ / segments(); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::optional<double>& amplitude_cap() const { return amplitude_cap_; }

  /// Every segment split into `factor` equal pieces with the same amplitude.
  PulseSchedule refined(int factor) const;

 private:
  double duration_;
  Eigen::MatrixXd values_;
  std::optional<double> amplitude_cap_;
};

/// Single-qubit data re-uploading circuit; block k applies
/// R_z(x), then R_x(blocks[k].first), then R_y(blocks[k].second),
/// with R_a(phi) = exp(-i phi sigma_a).
struct GateCircuit {
  std::vector<std::pair<double, double>> blocks;

  int n_blocks() const { return static_cast<int>(blocks.size()); }
};

struct DomainSpec {
  int m = 1;
  double radius = 1.0;
};

PulseModel build_single_qubit_model();
PulseModel build_bivariate_model();
PulseModel build_circular_model(int n);

HermitianOperator total_hamiltonian(const PulseModel& model,
                                    std::span<const double> x,
                                    std::span<const double> theta);

/// x = R xbar, tbar = R t, thetabar = theta / R.
PulseSchedule rescale_schedule(const PulseSchedule& schedule, double radius);

UnitaryMatrix gate_propagator(const GateCircuit& circuit, double x);

/// Operator-norm gap between one Trotterized gate layer and the exact
/// segment propagator of x sigma_z + theta1 sigma_x + theta2 sigma_y over dt.
double trotter_gap(double theta1, double theta2, double x, double dt);

/// Parses sums of Pauli products such as "0.5*Z1Z2 + X2", "ZZ1" (letters
/// laid on consecutive sites starting at 1), "-Y3" or "I".
HermitianOperator parse_pauli_sum(const std::string& text, int n_qubits);

/// Resolves "single_qubit", "bivariate" and "circular:n".
PulseModel model_from_preset(const std::string& name);

/// Accepts a preset string, {"preset": ...} or an explicit description
/// {n_qubits, encoders: [...], controls: [...], initial_state: "01"}.
PulseModel model_from_json(const nlohmann::json& spec);

/// Observable from a Pauli sum, e.g. "Z1".
Observable observable_from_spec(const std::string& text, int n_qubits);

}  // namespace pqnn
