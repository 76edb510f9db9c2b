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

#include "pqnn/controllability.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace pqnn {

namespace {

// Residual below which a unit direction counts as inside the span.
constexpr double kReachedThreshold = 1e-6;
// Coefficient blocks with smaller norm are skipped when bracketing.
constexpr double kNegligibleBlock = 1e-14;

struct SparseEntry {
  int row;
  int col;
  cplx value;
};

// Orthonormal su(d) basis in sparse form, used to convert between matrices
// and real Hilbert-Schmidt coordinates.
class SuCoordinates {
 public:
  explicit SuCoordinates(int d) : d_(d) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& element : su_basis(d)) {
      std::vector<SparseEntry> entries;
      for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
          const cplx v = element.matrix()(r, c);
          if (v != cplx(0.0)) entries.push_back({r, c, v * inv_sqrt2});
        }
      }
      basis_.push_back(std::move(entries));
    }
  }

  int size() const { return static_cast<int>(basis_.size()); }

  // coords[i] = Re tr(B_i^dagger A)
  void to_coords(const Matrix& a, double* coords) const {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      double acc = 0.0;
      for (const auto& e : basis_[i]) acc += (std::conj(e.value) * a(e.row, e.col)).real();
      coords[i] = acc;
    }
  }

  Matrix from_coords(const double* coords) const {
    Matrix a = Matrix::Zero(d_, d_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (coords[i] == 0.0) continue;
      for (const auto& e : basis_[i]) a(e.row, e.col) += coords[i] * e.value;
    }
    return a;
  }

 private:
  int d_;
  std::vector<std::vector<SparseEntry>> basis_;
};

class ClosureEngine {
 public:
  ClosureEngine(int ambient, double tol) : ambient_(ambient), tol_(tol) {}

  bool admit(Eigen::VectorXd v) {
    if (full()) return false;
    const double norm = v.norm();
    if (norm <= tol_) return false;
    v /= norm;
    // Two Gram-Schmidt passes keep the basis orthonormal to round-off.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) v -= b.dot(v) * b;
    }
    const double residual = v.norm();
    if (residual <= tol_) return false;
    basis_.push_back(v / residual);
    return true;
  }

  bool full() const { return static_cast<int>(basis_.size()) >= ambient_; }

  // Breadth-first commutator closure of the current basis; returns the
  // number of generations that admitted new elements.
  template <class Bracket>
  int close(Bracket&& bracket) {
    std::vector<std::size_t> frontier(basis_.size());
    std::iota(frontier.begin(), frontier.end(), std::size_t{0});
    int generations = 0;
    while (!frontier.empty() && !full()) {
      const std::set<std::size_t> in_frontier(frontier.begin(), frontier.end());
      std::vector<std::size_t> next;
      for (std::size_t i : frontier) {
        const std::size_t known = basis_.size();
        for (std::size_t j = 0; j < known && !full(); ++j) {
          if (j == i || (j < i && in_frontier.count(j))) continue;
          const Eigen::VectorXd a = basis_[i];
          const Eigen::VectorXd b = basis_[j];
          if (admit(bracket(a, b))) next.push_back(basis_.size() - 1);
        }
      }
      if (!next.empty()) ++generations;
      frontier = std::move(next);
    }
    return generations;
  }

  double residual(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) r -= b.dot(r) * b;
    }
    return r.norm();
  }

  std::vector<Eigen::VectorXd> take_basis() { return std::move(basis_); }
  int dimension() const { return static_cast<int>(basis_.size()); }

 private:
  int ambient_;
  double tol_;
  std::vector<Eigen::VectorXd> basis_;
};

Matrix bracket(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Monomial add_monomials(const Monomial& a, const Monomial& b) {
  Monomial out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

void check_skew(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("generator must be square");
  if (max_abs(a + a.adjoint()) > LieElement::kTolerance * std::max(1.0, max_abs(a))) {
    throw Error("generator is not skew-Hermitian");
  }
}

Matrix traceless(const Matrix& a) {
  const auto d = a.rows();
  return a - (a.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
}

// Fills reached/missing/coverage of `report` from the final engine span.
void classify_directions(const ClosureEngine& engine,
                         const std::vector<Monomial>& monomials, int d,
                         bool polynomial, ClosureReport& report) {
  const auto labels = su_basis_labels(d);
  const int n_dir = d * d - 1;
  const int total = static_cast<int>(monomials.size()) * n_dir;
  int max_degree = 0;
  for (const auto& m : monomials) max_degree = std::max(max_degree, degree(m));
  report.coverage_by_degree.assign(static_cast<std::size_t>(max_degree) + 1, {0, 0});
  for (std::size_t mu = 0; mu < monomials.size(); ++mu) {
    const int deg = degree(monomials[mu]);
    for (int i = 0; i < n_dir; ++i) {
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(total);
      unit(static_cast<Eigen::Index>(mu) * n_dir + i) = 1.0;
      const std::string name =
          polynomial ? monomial_label(monomials[mu]) + "*" + labels[static_cast<std::size_t>(i)]
                     : labels[static_cast<std::size_t>(i)];
      auto& cov = report.coverage_by_degree[static_cast<std::size_t>(deg)];
      ++cov.second;
      if (engine.residual(unit) < kReachedThreshold) {
        report.reached.push_back(name);
        ++cov.first;
      } else {
        report.missing.push_back(name);
      }
    }
  }
}

}  // namespace

LieElement::LieElement(Matrix matrix) : matrix_(std::move(matrix)) {
  check_skew(matrix_);
  if (std::abs(matrix_.trace()) > kTolerance * std::max(1.0, max_abs(matrix_))) {
    throw Error("Lie element must be traceless");
  }
}

LieElement LieElement::from_hamiltonian(const HermitianOperator& h) {
  return LieElement(cplx(0.0, 1.0) * traceless(h.matrix()));
}

LieElement commutator(const LieElement& a, const LieElement& b) {
  if (a.dim() != b.dim()) throw Error("dimension mismatch");
  return LieElement(bracket(a.matrix(), b.matrix()));
}

int degree(const Monomial& mono) {
  return std::accumulate(mono.begin(), mono.end(), 0);
}

PolyLieElement::PolyLieElement(int n_vars, int degree_cutoff)
    : n_vars_(n_vars), cutoff_(degree_cutoff) {
  if (n_vars < 1) throw Error("need at least one variable");
  if (degree_cutoff < 0) throw Error("degree cutoff must be nonnegative");
}

void PolyLieElement::add(const Monomial& mono, const Matrix& a) {
  if (static_cast<int>(mono.size()) != n_vars_) throw Error("monomial arity mismatch");
  if (degree(mono) > cutoff_) return;
  check_skew(a);
  auto [it, inserted] = terms_.try_emplace(mono, a);
  if (!inserted) it->second += a;
}

PolyLieElement commutator(const PolyLieElement& a, const PolyLieElement& b) {
  if (a.n_vars() != b.n_vars() || a.degree_cutoff() != b.degree_cutoff()) {
    throw Error("polynomial Lie elements live in different algebras");
  }
  PolyLieElement out(a.n_vars(), a.degree_cutoff());
  for (const auto& [ma, xa] : a.terms()) {
    for (const auto& [mb, xb] : b.terms()) {
      if (degree(ma) + degree(mb) > a.degree_cutoff()) continue;
      out.add(add_monomials(ma, mb), bracket(xa, xb));
    }
  }
  return out;
}

std::vector<LieElement> su_basis(int d) {
  if (d < 2) throw Error("su(d) needs d >= 2");
  std::vector<LieElement> out;
  const cplx i(0.0, 1.0);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      Matrix x = Matrix::Zero(d, d);
      x(a, b) = i;
      x(b, a) = i;
      out.emplace_back(std::move(x));
      Matrix y = Matrix::Zero(d, d);
      y(a, b) = 1.0;
      y(b, a) = -1.0;
      out.emplace_back(std::move(y));
    }
  }
  for (int l = 1; l < d; ++l) {
    Matrix z = Matrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int a = 0; a < l; ++a) z(a, a) = i * scale;
    z(l, l) = -i * scale * static_cast<double>(l);
    out.emplace_back(std::move(z));
  }
  return out;
}

std::vector<std::string> su_basis_labels(int d) {
  if (d == 2) return {"X", "Y", "Z"};
  std::vector<std::string> out;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const std::string pair = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      out.push_back("X" + pair);
      out.push_back("Y" + pair);
    }
  }
  for (int l = 1; l < d; ++l) out.push_back("Z(" + std::to_string(l) + ")");
  return out;
}

std::vector<Monomial> monomials_up_to(int n_vars, int cutoff) {
  std::vector<Monomial> out;
  for (int total = 0; total <= cutoff; ++total) {
    // Exponent vectors of this total degree, lexicographically descending.
    Monomial mono(static_cast<std::size_t>(n_vars), 0);
    const auto fill = [&](auto&& self, int var, int remaining) -> void {
      if (var == n_vars - 1) {
        mono[static_cast<std::size_t>(var)] = remaining;
        out.push_back(mono);
        return;
      }
      for (int r = remaining; r >= 0; --r) {
        mono[static_cast<std::size_t>(var)] = r;
        self(self, var + 1, remaining - r);
      }
    };
    fill(fill, 0, total);
  }
  return out;
}

std::string monomial_label(const Monomial& mono) {
  std::string out;
  for (std::size_t j = 0; j < mono.size(); ++j) {
    if (mono[j] == 0) continue;
    if (!out.empty()) out += "*";
    out += mono.size() == 1 ? "x" : "x" + std::to_string(j + 1);
    if (mono[j] > 1) out += "^" + std::to_string(mono[j]);
  }
  return out.empty() ? "1" : out;
}

ClosureReport lie_closure(const std::vector<Matrix>& generators, double tol) {
  if (generators.empty()) throw Error("lie_closure needs at least one generator");
  const int d = static_cast<int>(generators.front().rows());
  if (d < 2) throw Error("su(d) needs d >= 2");
  for (const auto& g : generators) {
    if (g.rows() != d || g.cols() != d) throw Error("generator dimension mismatch");
    check_skew(g);
  }
  const SuCoordinates coords(d);
  const int ambient = d * d - 1;
  ClosureEngine engine(ambient, tol);
  for (const auto& g : generators) {
    Eigen::VectorXd v(ambient);
    coords.to_coords(traceless(g), v.data());
    engine.admit(std::move(v));
  }
  ClosureReport report;
  report.generations = engine.close([&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(ambient);
    coords.to_coords(bracket(coords.from_coords(a.data()), coords.from_coords(b.data())),
                     out.data());
    return out;
  });
  report.dimension = engine.dimension();
  report.ambient_dimension = ambient;
  report.verdict = report.dimension == ambient ? Verdict::kFull : Verdict::kDeficient;
  classify_directions(engine, {Monomial{0}}, d, false, report);
  report.summary =
      report.full()
          ? "generators span su(" + std::to_string(d) + ")"
          : "generators span a subalgebra of dimension " +
                std::to_string(report.dimension) + " < " + std::to_string(ambient);
  report.basis = engine.take_basis();
  return report;
}

ClosureReport ensemble_closure(
    const std::vector<std::pair<HermitianOperator, int>>& encoders,
    const std::vector<HermitianOperator>& controls, int degree_cutoff,
    double tol) {
  if (degree_cutoff < 1) throw Error("degree cutoff must be at least 1");
  if (encoders.empty() && controls.empty()) throw Error("no generators");
  const int d = encoders.empty() ? controls.front().dim() : encoders.front().first.dim();
  if (d < 2) throw Error("su(d) needs d >= 2");
  int n_vars = 1;
  for (const auto& [op, var] : encoders) {
    if (op.dim() != d) throw Error("encoder dimension mismatch");
    if (var < 0) throw Error("negative variable index");
    n_vars = std::max(n_vars, var + 1);
  }
  for (const auto& op : controls) {
    if (op.dim() != d) throw Error("control dimension mismatch");
  }

  const SuCoordinates coords(d);
  const int n_dir = coords.size();
  const auto monomials = monomials_up_to(n_vars, degree_cutoff);
  std::map<Monomial, int> index;
  for (std::size_t mu = 0; mu < monomials.size(); ++mu) {
    index.emplace(monomials[mu], static_cast<int>(mu));
  }
  const int n_mono = static_cast<int>(monomials.size());
  const int ambient = n_mono * n_dir;
  const cplx i(0.0, 1.0);

  ClosureEngine engine(ambient, tol);
  const auto seed = [&](const Monomial& mono, const HermitianOperator& h) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ambient);
    coords.to_coords(i * traceless(h.matrix()), v.data() + index.at(mono) * n_dir);
    engine.admit(std::move(v));
  };
  for (const auto& [op, var] : encoders) {
    Monomial mono(static_cast<std::size_t>(n_vars), 0);
    mono[static_cast<std::size_t>(var)] = 1;
    seed(mono, op);
  }
  for (const auto& op : controls) seed(Monomial(static_cast<std::size_t>(n_vars), 0), op);

  ClosureReport report;
  report.generations = engine.close([&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::vector<std::pair<int, Matrix>> blocks_a, blocks_b;
    for (int mu = 0; mu < n_mono; ++mu) {
      if (a.segment(mu * n_dir, n_dir).norm() > kNegligibleBlock) {
        blocks_a.emplace_back(mu, coords.from_coords(a.data() + mu * n_dir));
      }
      if (b.segment(mu * n_dir, n_dir).norm() > kNegligibleBlock) {
        blocks_b.emplace_back(mu, coords.from_coords(b.data() + mu * n_dir));
      }
    }
    std::map<int, Matrix> acc;
    for (const auto& [ma, xa] : blocks_a) {
      for (const auto& [mb, xb] : blocks_b) {
        const auto& pa = monomials[static_cast<std::size_t>(ma)];
        const auto& pb = monomials[static_cast<std::size_t>(mb)];
        if (degree(pa) + degree(pb) > degree_cutoff) continue;
        const int target = index.at(add_monomials(pa, pb));
        auto [it, inserted] = acc.try_emplace(target, bracket(xa, xb));
        if (!inserted) it->second += bracket(xa, xb);
      }
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ambient);
    for (const auto& [mu, x] : acc) coords.to_coords(x, out.data() + mu * n_dir);
    return out;
  });
  report.dimension = engine.dimension();
  report.ambient_dimension = ambient;
  report.degree_cutoff = degree_cutoff;
  report.verdict = report.dimension == ambient ? Verdict::kFull : Verdict::kDeficient;
  classify_directions(engine, monomials, d, true, report);
  const std::string cutoff = std::to_string(degree_cutoff);
  report.summary =
      report.full()
          ? "ensemble controllable up to degree " + cutoff
          : "not ensemble controllable up to degree " + cutoff + " (" +
                std::to_string(report.dimension) + " of " + std::to_string(ambient) +
                " directions); this condition is sufficient but not necessary, "
                "so the model may still be expressive for suitable observables "
                "and initial states";
  report.basis = engine.take_basis();
  return report;
}

ModelCheck check_model(const PulseModel& model, int degree_cutoff, double tol) {
  ModelCheck out;
  const int d = model.dim();
  if (model.controls().empty()) {
    out.controls.ambient_dimension = d * d - 1;
    out.controls.summary = "model has no control Hamiltonians";
    for (const auto& label : su_basis_labels(d)) out.controls.missing.push_back(label);
  } else {
    std::vector<Matrix> generators;
    for (const auto& h : model.controls()) generators.push_back(cplx(0.0, 1.0) * h.matrix());
    out.controls = lie_closure(generators, tol);
  }
  std::vector<std::pair<HermitianOperator, int>> encoders;
  for (int j = 0; j < model.n_inputs(); ++j) {
    encoders.emplace_back(model.encoders()[static_cast<std::size_t>(j)], j);
  }
  out.ensemble = ensemble_closure(encoders, model.controls(), degree_cutoff, tol);
  return out;
}

nlohmann::json to_json(const ClosureReport& report) {
  nlohmann::json coverage = nlohmann::json::array();
  for (std::size_t r = 0; r < report.coverage_by_degree.size(); ++r) {
    coverage.push_back({{"degree", r},
                        {"reached", report.coverage_by_degree[r].first},
                        {"total", report.coverage_by_degree[r].second}});
  }
  return {{"dimension", report.dimension},
          {"ambient_dimension", report.ambient_dimension},
          {"verdict", report.full() ? "full" : "deficient"},
          {"missing", report.missing},
          {"generations", report.generations},
          {"degree_cutoff", report.degree_cutoff},
          {"coverage_by_degree", coverage},
          {"summary", report.summary}};
}

nlohmann::json to_json(const ModelCheck& check) {
  return {{"controls", to_json(check.controls)},
          {"ensemble", to_json(check.ensemble)},
          {"verdict", check.ensemble.full() ? "full" : "deficient"},
          {"note",
           "a full verdict is sufficient for universal approximation; a "
           "deficient one does not prove the model inexpressive"}};
}

}  // namespace pqnn
