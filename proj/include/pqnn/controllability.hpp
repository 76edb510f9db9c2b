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

// Numeric Lie-algebra rank checks.
//
// `lie_closure` computes the real Lie algebra generated by skew-Hermitian
// matrices and compares it with su(d). `ensemble_closure` does the same for
// polynomial-coefficient elements p(x) (x) A, working modulo monomials of
// total degree above a cutoff. Those monomials span an ideal, so the
// truncated bracket [p A, q B] = (p q) [A, B] is well defined and a "full"
// verdict certifies the span of every monomial (x) su(d) up to that degree.
//
// Both engines keep an orthonormal basis in Hilbert-Schmidt coordinates and
// grow it breadth-first: each generation brackets the elements admitted by
// the previous generation against the whole basis and admits residuals whose
// norm exceeds the tolerance.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pqnn/linalg.hpp"
#include "pqnn/model.hpp"

namespace pqnn {

/// Traceless skew-Hermitian matrix, an element of su(d).
class LieElement {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Throws unless A^dagger = -A and |tr A| is negligible.
  explicit LieElement(Matrix matrix);

  /// i (H - tr(H)/d) for Hermitian H; the dropped trace is central.
  static LieElement from_hamiltonian(const HermitianOperator& h);

  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  Matrix matrix_;
};

LieElement commutator(const LieElement& a, const LieElement& b);

/// Exponents (r_1, ..., r_m) of x_1^r_1 ... x_m^r_m.
using Monomial = std::vector<int>;

int degree(const Monomial& mono);

/// Sum over monomials of mono (x) A_mono, truncated at a degree cutoff.
class PolyLieElement {
 public:
  PolyLieElement(int n_vars, int degree_cutoff);

  void add(const Monomial& mono, const Matrix& a);

  int n_vars() const { return n_vars_; }
  int degree_cutoff() const { return cutoff_; }
  const std::map<Monomial, Matrix>& terms() const { return terms_; }

 private:
  int n_vars_;
  int cutoff_;
  std::map<Monomial, Matrix> terms_;
};

/// Bilinear bracket with products above the cutoff discarded.
PolyLieElement commutator(const PolyLieElement& a, const PolyLieElement& b);

/// The d^2 - 1 generators X_ab = i(|a><b| + |b><a|), Y_ab = |a><b| - |b><a|
/// (a < b) and d - 1 generalized Gell-Mann diagonals, each of
/// Hilbert-Schmidt norm sqrt(2) and mutually orthogonal.
std::vector<LieElement> su_basis(int d);

/// Human-readable names matching su_basis order ("X", "Y", "Z" for d = 2).
std::vector<std::string> su_basis_labels(int d);

/// Monomials of total degree <= cutoff in graded lexicographic order.
std::vector<Monomial> monomials_up_to(int n_vars, int cutoff);

std::string monomial_label(const Monomial& mono);

enum class Verdict { kFull, kDeficient };

struct ClosureReport {
  std::vector<Eigen::VectorXd> basis;  // orthonormal HS coordinates
  int dimension = 0;
  int ambient_dimension = 0;
  Verdict verdict = Verdict::kDeficient;
  std::vector<std::string> missing;  // unreached monomial (x) direction pairs
  std::vector<std::string> reached;
  int generations = 0;
  int degree_cutoff = 0;  // 0 for plain su(d) closure
  // coverage[r] = reached directions among monomials of degree r.
  std::vector<std::pair<int, int>> coverage_by_degree;
  std::string summary;

  bool full() const { return verdict == Verdict::kFull; }
};

inline constexpr double kDefaultClosureTolerance = 1e-9;
inline constexpr int kDefaultDegreeCutoff = 4;

ClosureReport lie_closure(const std::vector<Matrix>& generators,
                          double tol = kDefaultClosureTolerance);

/// Encoders are (D_j, variable index j) pairs, j in [0, m); generators are
/// x_j (x) iD_j and 1 (x) iH_k.
ClosureReport ensemble_closure(
    const std::vector<std::pair<HermitianOperator, int>>& encoders,
    const std::vector<HermitianOperator>& controls, int degree_cutoff,
    double tol = kDefaultClosureTolerance);

struct ModelCheck {
  ClosureReport controls;  // {iH_1, ..., iH_p}_LA against su(d)
  ClosureReport ensemble;  // truncated polynomial closure
};

ModelCheck check_model(const PulseModel& model,
                       int degree_cutoff = kDefaultDegreeCutoff,
                       double tol = kDefaultClosureTolerance);

nlohmann::json to_json(const ClosureReport& report);
nlohmann::json to_json(const ModelCheck& check);

}  // namespace pqnn
