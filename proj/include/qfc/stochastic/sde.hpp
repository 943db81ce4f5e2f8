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

#ifndef QFC_STOCHASTIC_SDE_HPP
#define QFC_STOCHASTIC_SDE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "qfc/core/linalg.hpp"

namespace qfc {

/// Fixed-step schedule. dt * step_count reproduces the horizon.
struct SdeStepperConfig {
  double dt = 1e-3;
  std::size_t step_count = 1;
  bool renormalize = true;

  /// Rounds horizon/dt to a step count and shrinks dt to land exactly on the horizon.
  static SdeStepperConfig for_horizon(double horizon, double dt, bool renormalize = true) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("SdeStepperConfig: horizon and dt must be positive");
    const double n = std::max(1.0, std::round(horizon / dt));
    SdeStepperConfig c;
    c.step_count = static_cast<std::size_t>(n);
    c.dt = horizon / n;
    c.renormalize = renormalize;
    return c;
  }

  double horizon() const { return dt * static_cast<double>(step_count); }
};

/// X + f(X) dt + sigma(X) dw, coefficients at the left endpoint.
template <class Drift, class Diffusion>
RealVector euler_maruyama_step(const RealVector& state, Drift&& drift, Diffusion&& diffusion, double dt, double dw) {
  RealVector next = state + drift(state) * dt + diffusion(state) * dw;
  if (!next.allFinite()) throw IntegrationError("euler_maruyama_step: non-finite state");
  return next;
}

} // namespace qfc

#endif // QFC_STOCHASTIC_SDE_HPP
