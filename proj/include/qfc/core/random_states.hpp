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

#ifndef QFC_CORE_RANDOM_STATES_HPP
#define QFC_CORE_RANDOM_STATES_HPP

#include "qfc/core/state.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc {

inline ComplexMatrix random_ginibre(Index rows, Index cols, RngStream& rng) {
  ComplexMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  return g;
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
inline ComplexMatrix random_unitary(Index d, RngStream& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

inline ComplexMatrix random_hermitian(Index d, RngStream& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

inline PureState random_pure_state(Index d, RngStream& rng) {
  ComplexVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return PureState::normalized(v);
}

/// G G^dagger / Tr with G of shape d x rank (full rank when rank == 0).
inline DensityMatrix random_density(Index d, RngStream& rng, Index rank = 0) {
  const ComplexMatrix g = random_ginibre(d, rank > 0 ? rank : d, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(hermitian_part(m));
}

} // namespace qfc

#endif // QFC_CORE_RANDOM_STATES_HPP
