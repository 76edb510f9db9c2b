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

#include "pqnn/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

namespace pqnn {

namespace {

QuantumState ground_state(int n_qubits) {
  return QuantumState::basis(1 << n_qubits, 0);
}

std::vector<std::string> default_labels(const std::string& prefix,
                                        std::size_t count) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < count; ++i) {
    labels.push_back(prefix + std::to_string(i + 1));
  }
  return labels;
}

Matrix rotation(PauliAxis axis, double angle) {
  return std::cos(angle) * Matrix::Identity(2, 2) +
         cplx(0.0, -std::sin(angle)) * pauli_matrix(axis);
}

PauliAxis axis_from_letter(char c) {
  switch (c) {
    case 'X':
      return PauliAxis::X;
    case 'Y':
      return PauliAxis::Y;
    case 'Z':
      return PauliAxis::Z;
    default:
      throw Error(std::string("unknown Pauli letter '") + c + "'");
  }
}

// Recursive-descent reader for real-weighted sums of Pauli products.
class PauliSumParser {
 public:
  PauliSumParser(const std::string& text, int n_qubits)
      : text_(text), n_qubits_(n_qubits), dim_(1 << n_qubits) {}

  Matrix parse() {
    Matrix total = Matrix::Zero(dim_, dim_);
    skip_space();
    if (at_end()) fail("empty operator");
    double sign = read_sign();
    while (true) {
      total += sign * term();
      skip_space();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') fail("expected '+' or '-'");
      sign = read_sign();
    }
    return total;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("cannot parse Pauli sum \"" + text_ + "\" at offset " +
                std::to_string(pos_) + ": " + what);
  }

  double read_sign() {
    double sign = 1.0;
    skip_space();
    while (!at_end() && (peek() == '+' || peek() == '-')) {
      if (peek() == '-') sign = -sign;
      ++pos_;
      skip_space();
    }
    return sign;
  }

  Matrix term() {
    skip_space();
    if (at_end()) fail("missing term");
    double coefficient = 1.0;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      coefficient = std::strtod(begin, &end);
      pos_ += static_cast<std::size_t>(end - begin);
      skip_space();
      if (at_end() || peek() != '*') {
        return coefficient * Matrix::Identity(dim_, dim_);
      }
      ++pos_;
      skip_space();
    }
    return coefficient * product();
  }

  Matrix product() {
    if (at_end()) fail("missing Pauli product");
    Matrix out = Matrix::Identity(dim_, dim_);
    if (peek() == 'I') {
      ++pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        ++pos_;
      }
      return out;
    }
    std::set<int> used;
    bool any = false;
    while (!at_end() && std::string("XYZ").find(peek()) != std::string::npos) {
      std::string letters;
      while (!at_end() && std::string("XYZ").find(peek()) != std::string::npos) {
        letters += peek();
        ++pos_;
      }
      std::string digits;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        ++pos_;
      }
      if (digits.empty()) fail("Pauli letters must be followed by a site");
      const int start = std::stoi(digits);
      for (std::size_t i = 0; i < letters.size(); ++i) {
        const int site = start + static_cast<int>(i);
        if (site < 1 || site > n_qubits_) fail("site out of range");
        if (!used.insert(site).second) fail("site repeated within a product");
        out = out * pauli_embed(axis_from_letter(letters[i]), site, n_qubits_)
                        .matrix();
      }
      any = true;
    }
    if (!any) fail("expected a Pauli product");
    return out;
  }

  const std::string& text_;
  int n_qubits_;
  Eigen::Index dim_;
  std::size_t pos_ = 0;
};

QuantumState state_from_bits(const std::string& bits, int n_qubits) {
  if (static_cast<int>(bits.size()) != n_qubits) {
    throw Error("initial_state bitstring must have one bit per qubit");
  }
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error("initial_state must be a bitstring");
    index = 2 * index + (c - '0');
  }
  return QuantumState::basis(1 << n_qubits, index);
}

}  // namespace

PulseModel::PulseModel(int n_qubits, std::vector<HermitianOperator> encoders,
                       std::vector<HermitianOperator> controls,
                       std::vector<std::string> encoder_labels,
                       std::vector<std::string> control_labels,
                       std::optional<QuantumState> initial_state)
    : n_qubits_(n_qubits),
      encoders_(std::move(encoders)),
      controls_(std::move(controls)),
      encoder_labels_(std::move(encoder_labels)),
      control_labels_(std::move(control_labels)),
      initial_state_(initial_state ? *initial_state
                                   : QuantumState::basis(2, 0)) {
  if (n_qubits_ < 1 || n_qubits_ > 6) {
    throw Error("qubit count must be in 1..6");
  }
  if (!initial_state) initial_state_ = ground_state(n_qubits_);
  const int d = dim();
  for (const auto& op : encoders_) {
    if (op.dim() != d) throw Error("encoder dimension mismatch");
  }
  for (const auto& op : controls_) {
    if (op.dim() != d) throw Error("control dimension mismatch");
  }
  if (initial_state_.dim() != d) throw Error("initial state dimension mismatch");
  if (encoder_labels_.empty()) {
    encoder_labels_ = default_labels("D", encoders_.size());
  }
  if (control_labels_.empty()) {
    control_labels_ = default_labels("H", controls_.size());
  }
  if (encoder_labels_.size() != encoders_.size() ||
      control_labels_.size() != controls_.size()) {
    throw Error("label count mismatch");
  }
}

PulseModel PulseModel::with_controls(const std::vector<int>& keep) const {
  std::vector<HermitianOperator> controls;
  std::vector<std::string> labels;
  for (int k : keep) {
    if (k < 0 || k >= n_controls()) throw Error("control index out of range");
    controls.push_back(controls_[k]);
    labels.push_back(control_labels_[k]);
  }
  return PulseModel(n_qubits_, encoders_, std::move(controls), encoder_labels_,
                    std::move(labels), initial_state_);
}

PulseSchedule::PulseSchedule(double duration, Eigen::MatrixXd values,
                             std::optional<double> amplitude_cap)
    : duration_(duration),
      values_(std::move(values)),
      amplitude_cap_(amplitude_cap) {
  if (!(duration_ > 0.0)) throw Error("pulse duration must be positive");
  if (values_.rows() < 1) throw Error("pulse needs at least one segment");
  if (amplitude_cap_) {
    if (!(*amplitude_cap_ > 0.0)) throw Error("amplitude cap must be positive");
    if (values_.size() > 0 && values_.cwiseAbs().maxCoeff() > *amplitude_cap_) {
      throw Error("pulse amplitude exceeds cap");
    }
  }
}

PulseSchedule PulseSchedule::zeros(double duration, int segments,
                                   int n_controls) {
  if (segments < 1) throw Error("pulse needs at least one segment");
  return PulseSchedule(duration, Eigen::MatrixXd::Zero(segments, n_controls));
}

PulseSchedule PulseSchedule::refined(int factor) const {
  if (factor < 1) throw Error("refinement factor must be positive");
  Eigen::MatrixXd fine(values_.rows() * factor, values_.cols());
  for (Eigen::Index j = 0; j < values_.rows(); ++j) {
    for (int r = 0; r < factor; ++r) fine.row(j * factor + r) = values_.row(j);
  }
  return PulseSchedule(duration_, std::move(fine), amplitude_cap_);
}

PulseModel build_single_qubit_model() {
  return PulseModel(1, {pauli_embed(PauliAxis::Z, 1, 1)},
                    {pauli_embed(PauliAxis::X, 1, 1),
                     pauli_embed(PauliAxis::Y, 1, 1)},
                    {"Z1"}, {"X1", "Y1"});
}

PulseModel build_bivariate_model() {
  return PulseModel(1,
                    {pauli_embed(PauliAxis::X, 1, 1),
                     pauli_embed(PauliAxis::Y, 1, 1)},
                    {pauli_embed(PauliAxis::X, 1, 1),
                     pauli_embed(PauliAxis::Z, 1, 1)},
                    {"X1", "Y1"}, {"X1", "Z1"});
}

PulseModel build_circular_model(int n) {
  if (n < 1) throw Error("circular model needs at least one qubit");
  Matrix encoder = Matrix::Zero(1 << n, 1 << n);
  std::string encoder_label;
  for (int k = 1; k <= n; ++k) {
    encoder += pauli_embed(PauliAxis::Z, k, n).matrix();
    encoder_label += (k > 1 ? "+Z" : "Z") + std::to_string(k);
  }
  std::vector<HermitianOperator> controls;
  std::vector<std::string> labels;
  for (int k = 1; k <= n; ++k) {
    controls.push_back(pauli_embed(PauliAxis::X, k, n));
    labels.push_back("X" + std::to_string(k));
    controls.push_back(pauli_embed(PauliAxis::Y, k, n));
    labels.push_back("Y" + std::to_string(k));
  }
  // Ring couplings; for n = 2 the two bonds are the same operator.
  const int bonds = n == 1 ? 0 : (n == 2 ? 1 : n);
  for (int k = 1; k <= bonds; ++k) {
    const int next = k % n + 1;
    controls.push_back(HermitianOperator(pauli_embed(PauliAxis::Z, k, n).matrix() *
                                         pauli_embed(PauliAxis::Z, next, n).matrix()));
    labels.push_back("Z" + std::to_string(k) + "Z" + std::to_string(next));
  }
  return PulseModel(n, {HermitianOperator(std::move(encoder))},
                    std::move(controls), {encoder_label}, std::move(labels));
}

HermitianOperator total_hamiltonian(const PulseModel& model,
                                    std::span<const double> x,
                                    std::span<const double> theta) {
  if (static_cast<int>(x.size()) != model.n_inputs()) {
    throw Error("input arity mismatch: expected " +
                std::to_string(model.n_inputs()) + ", got " +
                std::to_string(x.size()));
  }
  if (static_cast<int>(theta.size()) != model.n_controls()) {
    throw Error("control arity mismatch: expected " +
                std::to_string(model.n_controls()) + ", got " +
                std::to_string(theta.size()));
  }
  Matrix h = Matrix::Zero(model.dim(), model.dim());
  for (std::size_t j = 0; j < x.size(); ++j) {
    h += x[j] * model.encoders()[j].matrix();
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    h += theta[k] * model.controls()[k].matrix();
  }
  return HermitianOperator(std::move(h));
}

PulseSchedule rescale_schedule(const PulseSchedule& schedule, double radius) {
  if (!(radius > 0.0)) throw Error("rescaling radius must be positive");
  std::optional<double> cap = schedule.amplitude_cap();
  if (cap) *cap /= radius;
  return PulseSchedule(schedule.duration() * radius,
                       schedule.values() / radius, cap);
}

UnitaryMatrix gate_propagator(const GateCircuit& circuit, double x) {
  Matrix u = Matrix::Identity(2, 2);
  const Matrix rz = rotation(PauliAxis::Z, x);
  for (const auto& [theta1, theta2] : circuit.blocks) {
    u = rotation(PauliAxis::Y, theta2) * rotation(PauliAxis::X, theta1) * rz * u;
  }
  return UnitaryMatrix(std::move(u));
}

double trotter_gap(double theta1, double theta2, double x, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const Matrix layer = rotation(PauliAxis::Y, theta2 * dt) *
                       rotation(PauliAxis::X, theta1 * dt) *
                       rotation(PauliAxis::Z, x * dt);
  const HermitianOperator h(x * pauli_matrix(PauliAxis::Z) +
                            theta1 * pauli_matrix(PauliAxis::X) +
                            theta2 * pauli_matrix(PauliAxis::Y));
  return operator_norm(layer - expm_hermitian(h, dt).matrix());
}

HermitianOperator parse_pauli_sum(const std::string& text, int n_qubits) {
  if (n_qubits < 1) throw Error("qubit count must be positive");
  PauliSumParser parser(text, n_qubits);
  return HermitianOperator(parser.parse());
}

PulseModel model_from_preset(const std::string& name) {
  if (name == "single_qubit") return build_single_qubit_model();
  if (name == "bivariate") return build_bivariate_model();
  const std::string prefix = "circular:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string count = name.substr(prefix.size());
    if (count.empty() ||
        count.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("bad circular model size in \"" + name + "\"");
    }
    return build_circular_model(std::stoi(count));
  }
  throw Error("unknown model preset \"" + name + "\"");
}

PulseModel model_from_json(const nlohmann::json& spec) {
  if (spec.is_string()) return model_from_preset(spec.get<std::string>());
  if (!spec.is_object()) throw Error("model spec must be a string or object");
  if (spec.contains("preset")) {
    return model_from_preset(spec.at("preset").get<std::string>());
  }
  if (!spec.contains("n_qubits") || !spec.contains("encoders") ||
      !spec.contains("controls")) {
    throw Error("model spec needs n_qubits, encoders and controls");
  }
  const int n = spec.at("n_qubits").get<int>();
  std::vector<HermitianOperator> encoders, controls;
  std::vector<std::string> encoder_labels, control_labels;
  for (const auto& item : spec.at("encoders")) {
    const auto text = item.get<std::string>();
    encoders.push_back(parse_pauli_sum(text, n));
    encoder_labels.push_back(text);
  }
  for (const auto& item : spec.at("controls")) {
    const auto text = item.get<std::string>();
    controls.push_back(parse_pauli_sum(text, n));
    control_labels.push_back(text);
  }
  std::optional<QuantumState> initial;
  if (spec.contains("initial_state")) {
    initial = state_from_bits(spec.at("initial_state").get<std::string>(), n);
  }
  return PulseModel(n, std::move(encoders), std::move(controls),
                    std::move(encoder_labels), std::move(control_labels),
                    std::move(initial));
}

Observable observable_from_spec(const std::string& text, int n_qubits) {
  return Observable(parse_pauli_sum(text, n_qubits));
}

}  // namespace pqnn
