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

#ifndef QFC_SME_SUPEROPERATORS_HPP
#define QFC_SME_SUPEROPERATORS_HPP

#include "qfc/core/linalg.hpp"

namespace qfc {

/// D[c]rho = c rho c^dagger - (c^dagger c rho + rho c^dagger c) / 2.
inline ComplexMatrix dissipator(const ComplexMatrix& c, const ComplexMatrix& rho) {
  require_square(c, "dissipator");
  require_same_shape(c, rho, "dissipator");
  const ComplexMatrix cd = c.adjoint();
  const ComplexMatrix cdc = cd * c;
  return c * rho * cd - 0.5 * (cdc * rho + rho * cdc);
}

/// H[c]rho = c rho + rho c^dagger - <c + c^dagger> rho.
inline ComplexMatrix meas_superop(const ComplexMatrix& c, const ComplexMatrix& rho) {
  require_square(c, "meas_superop");
  require_same_shape(c, rho, "meas_superop");
  const ComplexMatrix cr = c * rho;
  const ComplexMatrix rcd = rho * c.adjoint();
  const Complex e = cr.trace() + rcd.trace();
  return cr + rcd - e * rho;
}

} // namespace qfc

#endif // QFC_SME_SUPEROPERATORS_HPP
