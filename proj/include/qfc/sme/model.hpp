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

#ifndef QFC_SME_MODEL_HPP
#define QFC_SME_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qfc/core/linalg.hpp"
#include "qfc/core/spin.hpp"

namespace qfc {

/// u(t, rho). Evaluated at the left end of every step.
using ControlLaw = std::function<double(double, const ComplexMatrix&)>;

namespace control_laws {

inline ControlLaw constant(double u) {
  return [u](double, const ComplexMatrix&) { return u; };
}

/// values[i] on [breakpoints[i], breakpoints[i+1]); the last value holds afterwards.
inline ControlLaw piecewise_constant(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() || values.empty()) {
    throw std::invalid_argument("piecewise_constant: need one value per breakpoint");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("piecewise_constant: breakpoints must be sorted");
  }
  return [b = std::move(breakpoints), v = std::move(values)](double t, const ComplexMatrix&) {
    const auto it = std::upper_bound(b.begin(), b.end(), t);
    if (it == b.begin()) return v.front();
    return v[static_cast<std::size_t>(it - b.begin()) - 1];
  };
}

/// gain * (setpoint - <observable>).
inline ControlLaw proportional(double gain, ComplexMatrix observable, double setpoint) {
  return [gain, op = std::move(observable), setpoint](double, const ComplexMatrix& rho) {
    return gain * (setpoint - (op.array() * rho.transpose().array()).sum().real());
  };
}

} // namespace control_laws

/// One Lindblad/measurement channel c = sqrt(rate) * op.
///
/// efficiency 0 means unmonitored (pure dissipation); a measured channel has
/// efficiency in (0, 1] and contributes sqrt(efficiency) H[c] dW.
struct Channel {
  ComplexMatrix op;
  double rate = 1.0;
  double efficiency = 0.0;
  std::string name;

  bool measured() const { return efficiency > 0.0; }
};

/// H(t) = hamiltonian_base + u(t, rho) * control_channel, plus channels.
struct SmeModel {
  ComplexMatrix hamiltonian_base;
  ComplexMatrix control_channel;
  ControlLaw control_law;
  std::vector<Channel> channels;

  Index dim() const { return hamiltonian_base.rows(); }

  std::size_t measured_count() const {
    return static_cast<std::size_t>(
        std::count_if(channels.begin(), channels.end(), [](const Channel& c) { return c.measured(); }));
  }

  bool has_control() const { return control_channel.size() > 0 && static_cast<bool>(control_law); }

  double control(double t, const ComplexMatrix& rho) const { return has_control() ? control_law(t, rho) : 0.0; }

  ComplexMatrix hamiltonian(double t, const ComplexMatrix& rho) const {
    if (!has_control()) return hamiltonian_base;
    return hamiltonian_base + control(t, rho) * control_channel;
  }

  void validate() const {
    require_square(hamiltonian_base, "SmeModel hamiltonian_base");
    const Index d = dim();
    if (hermiticity_error(hamiltonian_base) > 1e-10) throw std::invalid_argument("SmeModel: H0 is not Hermitian");
    if (control_channel.size() > 0) {
      if (control_channel.rows() != d || control_channel.cols() != d) {
        throw DimensionError("SmeModel: control channel dimension mismatch");
      }
      if (hermiticity_error(control_channel) > 1e-10) throw std::invalid_argument("SmeModel: H_b is not Hermitian");
    }
    for (const auto& c : channels) {
      if (c.op.rows() != d || c.op.cols() != d) throw DimensionError("SmeModel: channel '" + c.name + "' dimension mismatch");
      if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw std::invalid_argument("SmeModel: channel rate must be >= 0");
      if (!(c.efficiency >= 0.0 && c.efficiency <= 1.0)) {
        throw std::invalid_argument("SmeModel: channel efficiency must lie in [0, 1]");
      }
    }
  }
};

/// Collective spin under F_z monitoring: H = u(t) F_y + s F_z, channel sqrt(M) F_z
/// with efficiency eta, and an optional unmonitored extra channel.
inline SmeModel spin_ensemble_model(int two_j, ControlLaw u_law, double s, double m_strength, double eta,
                                    std::optional<Channel> extra = std::nullopt) {
  if (!(m_strength >= 0.0)) throw std::invalid_argument("spin_ensemble_model: M must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("spin_ensemble_model: eta must lie in (0, 1]");
  const AngularMomentum f = angular_momentum_ops(two_j);
  SmeModel model;
  model.hamiltonian_base = s * f.fz;
  model.control_channel = f.fy;
  model.control_law = std::move(u_law);
  model.channels.push_back({f.fz, m_strength, eta, "Fz"});
  if (extra) {
    Channel c = *extra;
    c.efficiency = 0.0;
    if (c.name.empty()) c.name = "extra";
    model.channels.push_back(std::move(c));
  }
  model.validate();
  return model;
}

/// Single qubit, channel sqrt(2k) sigma_z with efficiency 1: the plain sigma_z
/// monitoring model dr = -k[Z,[Z,r]]dt + sqrt(2k) H[Z]r dW.
inline SmeModel qubit_dephasing_model(double k, double omega_x = 0.0) {
  if (!(k > 0.0)) throw std::invalid_argument("qubit_dephasing_model: k must be positive");
  SmeModel model;
  model.hamiltonian_base = 0.5 * omega_x * pauli_x();
  model.channels.push_back({pauli_z(), 2.0 * k, 1.0, "Z"});
  model.validate();
  return model;
}

} // namespace qfc

#endif // QFC_SME_MODEL_HPP
