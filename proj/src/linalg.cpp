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

#include "pqnn/linalg.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace pqnn {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("eigendecomposition failed");
  }
  return solver;
}

}  // namespace

QuantumState::QuantumState(Vector amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw Error("empty state vector");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw Error("state is not normalized (norm " + std::to_string(norm) + ")");
  }
}

QuantumState QuantumState::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw Error("basis index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return QuantumState(std::move(v));
}

HermitianOperator::HermitianOperator(Matrix entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error("operator must be square and nonempty");
  }
  if (max_abs(entries_ - entries_.adjoint()) > kTolerance) {
    throw Error("operator is not Hermitian");
  }
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::operator+(
    const HermitianOperator& other) const {
  if (other.dim() != dim()) throw Error("dimension mismatch");
  return HermitianOperator(entries_ + other.entries_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(entries_ * scale);
}

UnitaryMatrix::UnitaryMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error("unitary must be square and nonempty");
  }
  const Matrix defect =
      entries_.adjoint() * entries_ - Matrix::Identity(dim(), dim());
  if (max_abs(defect) > kTolerance) throw Error("matrix is not unitary");
}

UnitaryMatrix UnitaryMatrix::identity(int dim) {
  return UnitaryMatrix(Matrix::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& other) const {
  if (other.dim() != dim()) throw Error("dimension mismatch");
  return UnitaryMatrix(entries_ * other.entries_);
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
  return UnitaryMatrix(entries_.adjoint());
}

Observable::Observable(HermitianOperator op)
    : op_(std::move(op)),
      lambda_min_(0.0),
      lambda_max_(0.0),
      eigvec_min_(QuantumState::basis(op_.dim(), 0)),
      eigvec_max_(QuantumState::basis(op_.dim(), 0)) {
  const auto solver = eigensolve(op_.matrix());
  const Eigen::Index last = op_.dim() - 1;
  lambda_min_ = solver.eigenvalues()(0);
  lambda_max_ = solver.eigenvalues()(last);
  eigvec_min_ = QuantumState(solver.eigenvectors().col(0).normalized());
  eigvec_max_ = QuantumState(solver.eigenvectors().col(last).normalized());
}

Matrix pauli_matrix(PauliAxis axis) {
  Matrix s(2, 2);
  switch (axis) {
    case PauliAxis::X:
      s << 0.0, 1.0, 1.0, 0.0;
      break;
    case PauliAxis::Y:
      s << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
      break;
    case PauliAxis::Z:
      s << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return s;
}

HermitianOperator pauli_embed(PauliAxis axis, int site, int n_qubits) {
  if (n_qubits < 1) throw Error("qubit count must be positive");
  if (site < 1 || site > n_qubits) {
    throw Error("site " + std::to_string(site) + " out of range 1.." +
                std::to_string(n_qubits));
  }
  // Site 1 is the leftmost (most significant) tensor factor.
  const Matrix sigma = pauli_matrix(axis);
  const Eigen::Index left = Eigen::Index{1} << (site - 1);
  const Eigen::Index right = Eigen::Index{1} << (n_qubits - site);
  const Eigen::Index dim = left * 2 * right;
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (sigma(a, b) == cplx(0.0)) continue;
        for (Eigen::Index r = 0; r < right; ++r) {
          out((l * 2 + a) * right + r, (l * 2 + b) * right + r) = sigma(a, b);
        }
      }
    }
  }
  return HermitianOperator(std::move(out));
}

UnitaryMatrix expm_hermitian(const HermitianOperator& h, double s) {
  const auto solver = eigensolve(h.matrix());
  Vector phase(h.dim());
  for (int a = 0; a < h.dim(); ++a) {
    phase(a) = std::polar(1.0, -s * solver.eigenvalues()(a));
  }
  const Matrix& w = solver.eigenvectors();
  return UnitaryMatrix(w * phase.asDiagonal() * w.adjoint());
}

std::pair<UnitaryMatrix, Matrix> expm_with_derivative(
    const HermitianOperator& h, const HermitianOperator& v, double s) {
  if (h.dim() != v.dim()) throw Error("dimension mismatch");
  const Eigen::Index d = h.dim();
  const cplx scale(0.0, -s);
  Matrix block = Matrix::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = scale * h.matrix();
  block.bottomRightCorner(d, d) = scale * h.matrix();
  block.topRightCorner(d, d) = scale * v.matrix();
  const Matrix expd = block.exp();
  return {UnitaryMatrix(expd.topLeftCorner(d, d)),
          Matrix(expd.topRightCorner(d, d))};
}

double expectation(const Matrix& m, const Vector& psi) {
  if (m.rows() != psi.size()) throw Error("dimension mismatch");
  return psi.dot(m * psi).real();
}

double expectation(const Observable& m, const QuantumState& psi) {
  return expectation(m.op().matrix(), psi.amplitudes());
}

QuantumState target_state(const Observable& m, double y) {
  const double lo = m.lambda_min();
  const double hi = m.lambda_max();
  if (!(y >= lo && y <= hi)) {
    throw Error("target " + std::to_string(y) + " outside observable range [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (hi == lo) return m.eigvec_max();
  const double w_min = (y - hi) / (lo - hi);
  const double w_max = (y - lo) / (hi - lo);
  Vector v = std::sqrt(w_min) * m.eigvec_min().amplitudes() +
             std::sqrt(w_max) * m.eigvec_max().amplitudes();
  return QuantumState(v / v.norm());
}

double operator_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace pqnn
