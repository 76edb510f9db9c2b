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

// Spectral segment propagators used by the hot loops of the simulator.
//
// A segment propagator exp(-i s H) and all of its directional derivatives
// share one eigendecomposition H = W diag(lambda) W^dagger. In the eigenbasis
// the derivative along V is the Hadamard product of W^dagger V W with the
// divided differences of exp(-i s lambda), so a single decomposition per
// segment serves every control channel.

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace pqnn::spectral {

using cplx = std::complex<double>;

template <int Dim>
using Mat = Eigen::Matrix<cplx, Dim, Dim>;
template <int Dim>
using Vec = Eigen::Matrix<cplx, Dim, 1>;
template <int Dim>
using RVec = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
struct Decomposition {
  Mat<Dim> vectors;  // columns are orthonormal eigenvectors
  RVec<Dim> values;  // ascending
};

namespace detail {

// Closed form for 2x2 Hermitian matrices; the iterative solver dominates the
// single-qubit training loops otherwise.
inline void decompose2(const Mat<2>& h, Decomposition<2>& out) {
  const double a = h(0, 0).real();
  const double c = h(1, 1).real();
  const cplx b = h(0, 1);
  const double mean = 0.5 * (a + c);
  const double half_gap = 0.5 * (a - c);
  const double radius = std::hypot(half_gap, std::abs(b));
  out.values(0) = mean - radius;
  out.values(1) = mean + radius;
  if (radius == 0.0) {
    out.vectors.setIdentity();
    return;
  }
  cplx up0, up1;
  if (half_gap >= 0.0) {
    up0 = half_gap + radius;
    up1 = std::conj(b);
  } else {
    up0 = b;
    up1 = radius - half_gap;
  }
  const double norm = std::sqrt(std::norm(up0) + std::norm(up1));
  up0 /= norm;
  up1 /= norm;
  out.vectors(0, 1) = up0;
  out.vectors(1, 1) = up1;
  out.vectors(0, 0) = -std::conj(up1);
  out.vectors(1, 0) = std::conj(up0);
}

}  // namespace detail

template <int Dim>
void decompose(const Mat<Dim>& h, Decomposition<Dim>& out) {
  if constexpr (Dim == 2) {
    detail::decompose2(h, out);
  } else {
    Eigen::SelfAdjointEigenSolver<Mat<Dim>> solver(h);
    out.vectors = solver.eigenvectors();
    out.values = solver.eigenvalues();
  }
}

/// (exp(-i s a) - exp(-i s b)) / (a - b), continuous at a = b.
inline cplx divided_difference(double a, double b, double s) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (a - b) * s;
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0
                                             : std::sin(half) / half;
  return cplx(0.0, -s) * std::polar(1.0, -s * mid) * sinc;
}

template <int Dim>
Vec<Dim> phases(const Decomposition<Dim>& dec, double s) {
  Vec<Dim> out(dec.values.size());
  for (Eigen::Index a = 0; a < dec.values.size(); ++a) {
    out(a) = std::polar(1.0, -s * dec.values(a));
  }
  return out;
}

/// exp(-i s H) v.
template <int Dim>
Vec<Dim> propagate(const Decomposition<Dim>& dec, double s, const Vec<Dim>& v) {
  Vec<Dim> rotated = dec.vectors.adjoint() * v;
  rotated.array() *= phases(dec, s).array();
  return dec.vectors * rotated;
}

/// exp(+i s H) v, the adjoint propagator.
template <int Dim>
Vec<Dim> propagate_adjoint(const Decomposition<Dim>& dec, double s,
                           const Vec<Dim>& v) {
  return propagate(dec, -s, v);
}

template <int Dim>
Mat<Dim> divided_differences(const Decomposition<Dim>& dec, double s) {
  const Eigen::Index d = dec.values.size();
  Mat<Dim> g(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      g(a, b) = divided_difference(dec.values(a), dec.values(b), s);
    }
  }
  return g;
}

/// Full derivative matrix d/de exp(-i s (H + e V)).
template <int Dim>
Mat<Dim> derivative(const Decomposition<Dim>& dec, double s,
                    const Mat<Dim>& v) {
  const Mat<Dim> rotated = dec.vectors.adjoint() * v * dec.vectors;
  const Mat<Dim> weighted =
      (divided_differences(dec, s).array() * rotated.array()).matrix();
  return dec.vectors * weighted * dec.vectors.adjoint();
}

}  // namespace pqnn::spectral
