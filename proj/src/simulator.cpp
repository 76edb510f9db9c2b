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

#include "pqnn/simulator.hpp"

#include <algorithm>
#include <string>
#include <type_traits>

#include "pqnn/spectral.hpp"

namespace pqnn {

namespace {

// Samples are split into this many contiguous chunks regardless of the
// number of threads; partial sums are combined in chunk order.
constexpr std::size_t kChunks = 64;

struct SparseEntry {
  int row;
  int col;
  cplx value;
};
using SparseOp = std::vector<SparseEntry>;

SparseOp sparsify(const Matrix& m) {
  SparseOp out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != cplx(0.0)) {
        out.push_back({static_cast<int>(r), static_cast<int>(c), m(r, c)});
      }
    }
  }
  return out;
}

template <class Body>
void for_chunks(std::size_t n, Execution exec, Body&& body) {
  const std::size_t chunks = std::min(kChunks, n);
  const auto bounds = [n, chunks](std::size_t c) { return c * n / chunks; };
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t c = 0; c < chunks; ++c) body(c, bounds(c), bounds(c + 1));
  } else {
    for (std::size_t c = 0; c < chunks; ++c) body(c, bounds(c), bounds(c + 1));
  }
}

template <class Fn>
decltype(auto) dispatch_dim(int d, Fn&& fn) {
  switch (d) {
    case 2:
      return fn(std::integral_constant<int, 2>{});
    case 4:
      return fn(std::integral_constant<int, 4>{});
    case 8:
      return fn(std::integral_constant<int, 8>{});
    case 16:
      return fn(std::integral_constant<int, 16>{});
    default:
      return fn(std::integral_constant<int, Eigen::Dynamic>{});
  }
}

template <int Dim>
class PulseKernel {
 public:
  using Mat = spectral::Mat<Dim>;
  using Vec = spectral::Vec<Dim>;
  using Decomposition = spectral::Decomposition<Dim>;

  struct Workspace {
    std::vector<Decomposition> decompositions;
    std::vector<Vec> states;
  };

  PulseKernel(const PulseModel& model, const PulseSchedule& schedule,
              const Matrix& observable)
      : dim_(model.dim()),
        schedule_(schedule),
        initial_(model.initial_state().amplitudes()),
        observable_(observable) {
    for (const auto& op : model.encoders()) encoders_.push_back(sparsify(op.matrix()));
    for (const auto& op : model.controls()) controls_.push_back(sparsify(op.matrix()));
  }

  Mat hamiltonian(std::span<const double> x, Eigen::Index segment) const {
    Mat h = Mat::Zero(dim_, dim_);
    for (std::size_t i = 0; i < encoders_.size(); ++i) {
      for (const auto& e : encoders_[i]) h(e.row, e.col) += x[i] * e.value;
    }
    for (std::size_t k = 0; k < controls_.size(); ++k) {
      const double theta = schedule_.values()(segment, static_cast<Eigen::Index>(k));
      if (theta == 0.0) continue;
      for (const auto& e : controls_[k]) h(e.row, e.col) += theta * e.value;
    }
    return h;
  }

  Vec evolve(std::span<const double> x) const {
    Vec psi = initial_;
    Decomposition dec;
    const double dt = schedule_.dt();
    for (Eigen::Index j = 0; j < schedule_.segments(); ++j) {
      spectral::decompose<Dim>(hamiltonian(x, j), dec);
      psi = spectral::propagate<Dim>(dec, dt, psi);
    }
    return psi;
  }

  double measure(const Vec& psi) const {
    return psi.dot(observable_ * psi).real();
  }

  // Adds weight(f) * df/dtheta into `grad` and returns f.
  template <class Weight>
  double accumulate(std::span<const double> x, Weight&& weight,
                    Eigen::MatrixXd& grad, Workspace& ws) const {
    const Eigen::Index segments = schedule_.segments();
    const double dt = schedule_.dt();
    ws.decompositions.resize(static_cast<std::size_t>(segments));
    ws.states.resize(static_cast<std::size_t>(segments));

    Vec psi = initial_;
    for (Eigen::Index j = 0; j < segments; ++j) {
      auto& dec = ws.decompositions[static_cast<std::size_t>(j)];
      ws.states[static_cast<std::size_t>(j)] = psi;
      spectral::decompose<Dim>(hamiltonian(x, j), dec);
      psi = spectral::propagate<Dim>(dec, dt, psi);
    }
    const Vec measured = observable_ * psi;
    const double f = psi.dot(measured).real();
    const double w = weight(f);
    if (w == 0.0) return f;

    // Costate phi_j = U_{j+1}^dagger ... U_K^dagger M psi_K.
    Vec phi = measured;
    for (Eigen::Index j = segments - 1; j >= 0; --j) {
      const auto& dec = ws.decompositions[static_cast<std::size_t>(j)];
      const Vec phi_eig = dec.vectors.adjoint() * phi;
      const Vec psi_eig = dec.vectors.adjoint() * ws.states[static_cast<std::size_t>(j)];
      Mat weights = spectral::divided_differences<Dim>(dec, dt);
      for (Eigen::Index a = 0; a < weights.rows(); ++a) {
        for (Eigen::Index b = 0; b < weights.cols(); ++b) {
          weights(a, b) *= std::conj(phi_eig(a)) * psi_eig(b);
        }
      }
      // <phi| dU[V] |psi> = sum_cd V_cd * overlap_cd.
      const Mat overlap =
          dec.vectors.conjugate() * weights * dec.vectors.transpose();
      for (std::size_t k = 0; k < controls_.size(); ++k) {
        cplx acc = 0.0;
        for (const auto& e : controls_[k]) acc += e.value * overlap(e.row, e.col);
        grad(j, static_cast<Eigen::Index>(k)) += w * 2.0 * acc.real();
      }
      phi = spectral::propagate_adjoint<Dim>(dec, dt, phi);
    }
    return f;
  }

 private:
  int dim_;
  const PulseSchedule& schedule_;
  Vec initial_;
  Mat observable_;
  std::vector<SparseOp> encoders_;
  std::vector<SparseOp> controls_;
};

void check_schedule(const PulseModel& model, const PulseSchedule& schedule) {
  if (schedule.n_controls() != model.n_controls()) {
    throw Error("schedule has " + std::to_string(schedule.n_controls()) +
                " control channels, model has " +
                std::to_string(model.n_controls()));
  }
}

void check_input(const PulseModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.n_inputs()) {
    throw Error("input arity mismatch: expected " +
                std::to_string(model.n_inputs()) + ", got " +
                std::to_string(x.size()));
  }
}

void check_observable(const PulseModel& model, const Observable& m) {
  if (m.dim() != model.dim()) throw Error("observable dimension mismatch");
}

Matrix rotation(PauliAxis axis, double angle) {
  return std::cos(angle) * Matrix::Identity(2, 2) +
         cplx(0.0, -std::sin(angle)) * pauli_matrix(axis);
}

}  // namespace

void validate_training_set(const TrainingSet& data, int n_inputs,
                           const Observable& m) {
  if (data.inputs.empty()) throw Error("empty dataset");
  if (data.inputs.size() != data.targets.size()) {
    throw Error("dataset has mismatched input/target counts");
  }
  constexpr double kSlack = 1e-12;
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (static_cast<int>(data.inputs[k].size()) != n_inputs) {
      throw Error("sample " + std::to_string(k) + " has wrong input arity");
    }
    const double y = data.targets[k];
    if (!(y >= m.lambda_min() - kSlack && y <= m.lambda_max() + kSlack)) {
      throw Error("target " + std::to_string(y) + " of sample " +
                  std::to_string(k) +
                  " lies outside the observable range; normalize the "
                  "targets first (normalize_targets)");
    }
  }
}

QuantumState evolve(const PulseModel& model, const PulseSchedule& schedule,
                    std::span<const double> x) {
  check_schedule(model, schedule);
  check_input(model, x);
  Vector out = dispatch_dim(model.dim(), [&](auto dim) -> Vector {
    constexpr int D = decltype(dim)::value;
    PulseKernel<D> kernel(model, schedule, Matrix::Zero(model.dim(), model.dim()));
    return kernel.evolve(x);
  });
  return QuantumState(std::move(out));
}

Prediction predict(const PulseModel& model, const PulseSchedule& schedule,
                   std::span<const double> x, const Observable& m) {
  check_observable(model, m);
  QuantumState state = evolve(model, schedule, x);
  const double value = expectation(m, state);
  return Prediction{std::vector<double>(x.begin(), x.end()), value,
                    std::move(state)};
}

std::vector<Prediction> predict_batch(
    const PulseModel& model, const PulseSchedule& schedule,
    const std::vector<std::vector<double>>& xs, const Observable& m,
    Execution exec) {
  if (xs.empty()) throw Error("empty batch");
  check_schedule(model, schedule);
  check_observable(model, m);
  for (const auto& x : xs) check_input(model, x);

  std::vector<Vector> states(xs.size());
  dispatch_dim(model.dim(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const PulseKernel<D> kernel(model, schedule, m.op().matrix());
    for_chunks(xs.size(), exec, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) states[k] = kernel.evolve(xs[k]);
    });
  });
  std::vector<Prediction> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    QuantumState state(std::move(states[k]));
    const double value = expectation(m, state);
    out.push_back(Prediction{xs[k], value, std::move(state)});
  }
  return out;
}

double loss(const PulseModel& model, const PulseSchedule& schedule,
            const TrainingSet& data, const Observable& m, Execution exec) {
  check_schedule(model, schedule);
  check_observable(model, m);
  validate_training_set(data, model.n_inputs(), m);
  std::vector<double> partial(std::min(kChunks, data.size()), 0.0);
  dispatch_dim(model.dim(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const PulseKernel<D> kernel(model, schedule, m.op().matrix());
    for_chunks(data.size(), exec, [&](std::size_t c, std::size_t begin, std::size_t end) {
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const double r = kernel.measure(kernel.evolve(data.inputs[k])) - data.targets[k];
        sum += r * r;
      }
      partial[c] = sum;
    });
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(data.size());
}

GradientRecord loss_and_gradient(const PulseModel& model,
                                 const PulseSchedule& schedule,
                                 const TrainingSet& data, const Observable& m,
                                 Execution exec) {
  check_schedule(model, schedule);
  check_observable(model, m);
  validate_training_set(data, model.n_inputs(), m);
  const std::size_t chunks = std::min(kChunks, data.size());
  std::vector<double> partial_loss(chunks, 0.0);
  std::vector<Eigen::MatrixXd> partial_grad(
      chunks, Eigen::MatrixXd::Zero(schedule.segments(), schedule.n_controls()));
  const double inv_n = 1.0 / static_cast<double>(data.size());

  dispatch_dim(model.dim(), [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    const PulseKernel<D> kernel(model, schedule, m.op().matrix());
    for_chunks(data.size(), exec, [&](std::size_t c, std::size_t begin, std::size_t end) {
      typename PulseKernel<D>::Workspace ws;
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const double y = data.targets[k];
        const double f = kernel.accumulate(
            data.inputs[k], [&](double value) { return 2.0 * inv_n * (value - y); },
            partial_grad[c], ws);
        sum += (f - y) * (f - y);
      }
      partial_loss[c] = sum;
    });
  });

  GradientRecord out;
  out.grad = Eigen::MatrixXd::Zero(schedule.segments(), schedule.n_controls());
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += partial_loss[c];
    out.grad += partial_grad[c];
  }
  out.loss = total * inv_n;
  return out;
}

GradientRecord finite_difference_gradient(const PulseModel& model,
                                          const PulseSchedule& schedule,
                                          const TrainingSet& data,
                                          const Observable& m, double step) {
  if (!(step > 0.0)) throw Error("finite-difference step must be positive");
  GradientRecord out;
  out.loss = loss(model, schedule, data, m);
  out.grad = Eigen::MatrixXd::Zero(schedule.segments(), schedule.n_controls());
  for (Eigen::Index j = 0; j < schedule.segments(); ++j) {
    for (Eigen::Index k = 0; k < schedule.n_controls(); ++k) {
      Eigen::MatrixXd plus = schedule.values();
      Eigen::MatrixXd minus = schedule.values();
      plus(j, k) += step;
      minus(j, k) -= step;
      const double up = loss(model, PulseSchedule(schedule.duration(), plus), data, m);
      const double down = loss(model, PulseSchedule(schedule.duration(), minus), data, m);
      out.grad(j, k) = (up - down) / (2.0 * step);
    }
  }
  return out;
}

GateGradient gate_loss_and_gradient(const GateCircuit& circuit,
                                    const TrainingSet& data,
                                    const Observable& m, Execution exec) {
  if (m.dim() != 2) throw Error("gate circuit acts on one qubit");
  validate_training_set(data, 1, m);
  const int blocks = circuit.n_blocks();
  const std::size_t chunks = std::min(kChunks, data.size());
  std::vector<double> partial_loss(chunks, 0.0);
  std::vector<Eigen::VectorXd> partial_grad(chunks, Eigen::VectorXd::Zero(2 * blocks));
  const double inv_n = 1.0 / static_cast<double>(data.size());
  const Eigen::Matrix2cd observable = m.op().matrix();
  const Eigen::Matrix2cd sx = pauli_matrix(PauliAxis::X);
  const Eigen::Matrix2cd sy = pauli_matrix(PauliAxis::Y);
  std::vector<Eigen::Matrix2cd> rx(blocks), ry(blocks);
  for (int b = 0; b < blocks; ++b) {
    rx[b] = rotation(PauliAxis::X, circuit.blocks[b].first);
    ry[b] = rotation(PauliAxis::Y, circuit.blocks[b].second);
  }

  for_chunks(data.size(), exec, [&](std::size_t c, std::size_t begin, std::size_t end) {
    // after_x[b], after_y[b]: state right after the x / y rotation of block b.
    std::vector<Eigen::Vector2cd> after_x(blocks), after_y(blocks);
    double sum = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const Eigen::Matrix2cd rz = rotation(PauliAxis::Z, data.inputs[k][0]);
      Eigen::Vector2cd psi(1.0, 0.0);
      for (int b = 0; b < blocks; ++b) {
        psi = rx[b] * (rz * psi);
        after_x[b] = psi;
        psi = ry[b] * psi;
        after_y[b] = psi;
      }
      const Eigen::Vector2cd measured = observable * psi;
      const double f = psi.dot(measured).real();
      const double r = f - data.targets[k];
      sum += r * r;
      const double w = 2.0 * inv_n * r;
      // d/dtheta R(theta) = -i sigma R(theta).
      Eigen::Vector2cd phi = measured;
      for (int b = blocks - 1; b >= 0; --b) {
        const cplx dy = phi.dot(cplx(0.0, -1.0) * (sy * after_y[b]));
        partial_grad[c](2 * b + 1) += w * 2.0 * dy.real();
        phi = ry[b].adjoint() * phi;
        const cplx dx = phi.dot(cplx(0.0, -1.0) * (sx * after_x[b]));
        partial_grad[c](2 * b) += w * 2.0 * dx.real();
        phi = rz.adjoint() * (rx[b].adjoint() * phi);
      }
    }
    partial_loss[c] = sum;
  });

  GateGradient out;
  out.grad = Eigen::VectorXd::Zero(2 * blocks);
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += partial_loss[c];
    out.grad += partial_grad[c];
  }
  out.loss = total * inv_n;
  return out;
}

namespace reference {

namespace {

std::vector<double> segment_theta(const PulseSchedule& schedule, Eigen::Index j) {
  std::vector<double> theta(static_cast<std::size_t>(schedule.n_controls()));
  for (Eigen::Index k = 0; k < schedule.n_controls(); ++k) {
    theta[static_cast<std::size_t>(k)] = schedule.values()(j, k);
  }
  return theta;
}

}  // namespace

QuantumState evolve(const PulseModel& model, const PulseSchedule& schedule,
                    std::span<const double> x) {
  check_schedule(model, schedule);
  Vector psi = model.initial_state().amplitudes();
  for (Eigen::Index j = 0; j < schedule.segments(); ++j) {
    const auto h = total_hamiltonian(model, x, segment_theta(schedule, j));
    psi = expm_hermitian(h, schedule.dt()).matrix() * psi;
  }
  return QuantumState(std::move(psi));
}

GradientRecord loss_and_gradient(const PulseModel& model,
                                 const PulseSchedule& schedule,
                                 const TrainingSet& data, const Observable& m) {
  check_schedule(model, schedule);
  check_observable(model, m);
  validate_training_set(data, model.n_inputs(), m);
  const Eigen::Index segments = schedule.segments();
  const double dt = schedule.dt();
  const double inv_n = 1.0 / static_cast<double>(data.size());
  GradientRecord out;
  out.grad = Eigen::MatrixXd::Zero(segments, schedule.n_controls());
  double total = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::vector<HermitianOperator> hams;
    std::vector<Matrix> props;
    std::vector<Vector> before;
    Vector psi = model.initial_state().amplitudes();
    for (Eigen::Index j = 0; j < segments; ++j) {
      hams.push_back(total_hamiltonian(model, data.inputs[k], segment_theta(schedule, j)));
      props.push_back(expm_hermitian(hams.back(), dt).matrix());
      before.push_back(psi);
      psi = props.back() * psi;
    }
    const Vector measured = m.op().matrix() * psi;
    const double r = psi.dot(measured).real() - data.targets[k];
    total += r * r;
    Vector phi = measured;
    for (Eigen::Index j = segments - 1; j >= 0; --j) {
      const auto js = static_cast<std::size_t>(j);
      for (Eigen::Index c = 0; c < schedule.n_controls(); ++c) {
        const auto [u, du] = expm_with_derivative(
            hams[js], model.controls()[static_cast<std::size_t>(c)], dt);
        out.grad(j, c) += 2.0 * inv_n * r * 2.0 * phi.dot(du * before[js]).real();
      }
      phi = props[js].adjoint() * phi;
    }
  }
  out.loss = total * inv_n;
  return out;
}

}  // namespace reference

}  // namespace pqnn
