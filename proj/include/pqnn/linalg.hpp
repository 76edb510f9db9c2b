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

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace pqnn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised for contract violations: bad arities, out-of-range sites, invalid
/// operators and similar caller errors.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PauliAxis { X, Y, Z };

/// Unit-norm pure state of a d-level system.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-10;

  /// Throws if |amplitudes| deviates from 1 by more than kNormTolerance.
  explicit QuantumState(Vector amplitudes);

  /// Computational basis state |index> in dimension `dim`.
  static QuantumState basis(int dim, int index);

  const Vector& amplitudes() const { return amplitudes_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }

 private:
  Vector amplitudes_;
};

/// Dense Hermitian operator. Construction checks H = H^dagger entrywise.
class HermitianOperator {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit HermitianOperator(Matrix entries);
  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  const Matrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  Matrix entries_;
};

/// Dense unitary. Construction checks U^dagger U = I in max-norm.
class UnitaryMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit UnitaryMatrix(Matrix entries);
  static UnitaryMatrix identity(int dim);

  const Matrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

  UnitaryMatrix operator*(const UnitaryMatrix& other) const;
  UnitaryMatrix adjoint() const;

 private:
  Matrix entries_;
};

/// Measurement operator together with its extreme eigenpairs, which bound
/// the model output and define the perfect-fit states.
class Observable {
 public:
  explicit Observable(HermitianOperator op);

  const HermitianOperator& op() const { return op_; }
  int dim() const { return op_.dim(); }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  const QuantumState& eigvec_min() const { return eigvec_min_; }
  const QuantumState& eigvec_max() const { return eigvec_max_; }

 private:
  HermitianOperator op_;
  double lambda_min_;
  double lambda_max_;
  QuantumState eigvec_min_;
  QuantumState eigvec_max_;
};

/// Single-site Pauli matrix (2x2).
Matrix pauli_matrix(PauliAxis axis);

/// I (x) ... (x) sigma_axis (x) ... (x) I with the Pauli on `site` (1-based).
HermitianOperator pauli_embed(PauliAxis axis, int site, int n_qubits);

/// exp(-i s H) via eigendecomposition of H.
UnitaryMatrix expm_hermitian(const HermitianOperator& h, double s);

/// U = exp(-i s H) and dU = d/de exp(-i s (H + e V)) at e = 0, read off the
/// top-right block of exp([[-isH, -isV], [0, -isH]]).
std::pair<UnitaryMatrix, Matrix> expm_with_derivative(
    const HermitianOperator& h, const HermitianOperator& v, double s);

/// <psi|M|psi>.
double expectation(const Observable& m, const QuantumState& psi);
double expectation(const Matrix& m, const Vector& psi);

/// Superposition of the extreme eigenvectors of M whose expectation is y.
QuantumState target_state(const Observable& m, double y);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// Entrywise max |a_ij|.
double max_abs(const Matrix& a);

}  // namespace pqnn
