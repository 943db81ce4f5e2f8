// Copyright 2026 The QFC Authors
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

#ifndef QFC_CHAOS_SMAP_HPP
#define QFC_CHAOS_SMAP_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qfc/core/linalg.hpp"
#include "qfc/core/state.hpp"

namespace qfc::chaos {

struct SquaredState {
  DensityMatrix out;
  double success_prob = 0.0;
};

namespace detail {

inline DensityMatrix rewrap(ComplexMatrix m, const DensityMatrix& like) {
  if (like.is_raw()) return DensityMatrix::raw(std::move(m), like.tolerances());
  return DensityMatrix(hermitian_part(m), like.tolerances());
}

inline void require_raw_allowed(const DensityMatrix& rho, bool raw_allowed, const char* what) {
  if (rho.is_raw() && !raw_allowed) throw StateError(std::string(what) + ": raw state given but raw_allowed is false");
}

} // namespace detail

/// rho_ij -> rho_ij^2 / sum_i rho_ii^2. Raw inputs give raw outputs.
///
/// For raw inputs the diagonal may be complex; the normaliser is then the
/// complex sum and success_prob its real part.
inline SquaredState square_elements(const DensityMatrix& rho, bool raw_allowed = false) {
  detail::require_raw_allowed(rho, raw_allowed, "square_elements");
  const ComplexMatrix& m = rho.matrix();
  const ComplexMatrix sq = m.array().square().matrix();
  // complex for raw inputs, whose diagonals need not stay real
  const Complex norm = sq.diagonal().sum();
  if (!(std::abs(norm) >= 1e-15)) throw StateError("square_elements: sum of squared populations below 1e-15");
  return {detail::rewrap(sq / norm, rho), norm.real()};
}

inline bool is_power_of_two(Index d) { return d > 0 && (d & (d - 1)) == 0; }

/// Target index of the (generalized) XOR on |i>|j>: bitwise XOR when d is a
/// power of two, otherwise (i - j) mod d. Either way it is zero iff i == j.
inline Index generalized_xor(Index i, Index j, Index d) {
  if (is_power_of_two(d)) return i ^ j;
  return ((i - j) % d + d) % d;
}

inline ComplexMatrix xor_unitary(Index d) {
  const Index n = d * d;
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) u(i * d + generalized_xor(i, j, d), i * d + j) = 1.0;
  }
  return u;
}

/// rho (x) rho, XOR, keep the pair when the second register reads 0, trace it out.
inline SquaredState xor_postselect(const DensityMatrix& rho, bool raw_allowed = false) {
  detail::require_raw_allowed(rho, raw_allowed, "xor_postselect");
  const Index d = rho.dim();
  if (d > 16) throw DimensionError("xor_postselect: dimension above 16 not supported");
  const ComplexMatrix pair = tensor_product(rho.matrix(), rho.matrix());
  const ComplexMatrix u = xor_unitary(d);
  ComplexMatrix proj = ComplexMatrix::Zero(d, d);
  proj(0, 0) = 1.0;
  const ComplexMatrix keep = tensor_product(identity(d), proj);
  const ComplexMatrix post = keep * u * pair * u.adjoint() * keep;
  const ComplexMatrix reduced = partial_trace_matrix(post, {d, d}, 0);
  const Complex p = reduced.trace();
  if (!(std::abs(p) >= 1e-15)) throw StateError("xor_postselect: success probability below 1e-15");
  return {detail::rewrap(reduced / p, rho), p.real()};
}

/// [[cos x, sin x e^{i phi}], [-sin x e^{-i phi}, cos x]].
inline ComplexMatrix su2(double x, double phi) {
  ComplexMatrix u(2, 2);
  u << std::cos(x), std::sin(x) * std::polar(1.0, phi), -std::sin(x) * std::polar(1.0, -phi), std::cos(x);
  return u;
}

/// U S[rho] U^dagger, with U (x) U for two qubits.
inline DensityMatrix f_step(const DensityMatrix& rho, double x, double phi, bool raw_allowed = false) {
  const Index d = rho.dim();
  if (d != 2 && d != 4) throw DimensionError("f_step: one- or two-qubit state required");
  const SquaredState s = square_elements(rho, raw_allowed);
  const ComplexMatrix u1 = su2(x, phi);
  const ComplexMatrix u = d == 2 ? u1 : tensor_product(u1, u1);
  return detail::rewrap(u * s.out.matrix() * u.adjoint(), rho);
}

/// The perturbed Psi+ fixture, verbatim (not Hermitian, so raw mode).
inline DensityMatrix perturbed_bell_fixture() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 0.17;
  m(1, 1) = 0.3;
  m(1, 2) = 0.29;
  m(2, 1) = 0.205;
  m(2, 2) = 0.22;
  m(3, 3) = 0.31;
  return DensityMatrix::raw(std::move(m));
}

inline DensityMatrix psi_plus_density() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(1, 1) = m(1, 2) = m(2, 1) = m(2, 2) = 0.5;
  return DensityMatrix(std::move(m));
}

/// F_k = Re Tr(rho_{Psi+} rho_k) for k = 0..n_steps under F with (x, phi).
inline std::vector<double> bell_purify_iterate(const DensityMatrix& rho0, std::size_t n_steps,
                                               double x = std::numbers::pi / 4, double phi = std::numbers::pi / 2) {
  if (rho0.dim() != 4) throw DimensionError("bell_purify_iterate: two-qubit state required");
  const DensityMatrix target = psi_plus_density();
  std::vector<double> f;
  f.reserve(n_steps + 1);
  DensityMatrix rho = rho0;
  f.push_back(fidelity_trace(target, rho));
  for (std::size_t k = 0; k < n_steps; ++k) {
    rho = f_step(rho, x, phi, true);
    f.push_back(fidelity_trace(target, rho));
  }
  return f;
}

} // namespace qfc::chaos

#endif // QFC_CHAOS_SMAP_HPP
