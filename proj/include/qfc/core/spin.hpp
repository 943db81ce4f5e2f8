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

#ifndef QFC_CORE_SPIN_HPP
#define QFC_CORE_SPIN_HPP

#include <cmath>
#include <stdexcept>

#include "qfc/core/linalg.hpp"

namespace qfc {

struct AngularMomentum {
  ComplexMatrix fx;
  ComplexMatrix fy;
  ComplexMatrix fz;
};

/// Spin-j matrices in the basis m = j, j-1, ..., -j. two_j = 2j.
inline AngularMomentum angular_momentum_ops(int two_j) {
  if (two_j < 1) throw std::invalid_argument("angular_momentum_ops: two_j must be >= 1");
  const Index d = two_j + 1;
  const double j = 0.5 * two_j;
  ComplexMatrix jp = ComplexMatrix::Zero(d, d);
  ComplexMatrix fz = ComplexMatrix::Zero(d, d);
  for (Index a = 0; a < d; ++a) {
    const double m = j - static_cast<double>(a);
    fz(a, a) = m;
    // J+ |j,m> lands on row a-1
    if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix jm = jp.adjoint();
  AngularMomentum out;
  out.fx = 0.5 * (jp + jm);
  out.fy = (jp - jm) / Complex(0.0, 2.0);
  out.fz = fz;
  return out;
}

} // namespace qfc

#endif // QFC_CORE_SPIN_HPP
