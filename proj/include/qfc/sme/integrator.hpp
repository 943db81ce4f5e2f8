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

#ifndef QFC_SME_INTEGRATOR_HPP
#define QFC_SME_INTEGRATOR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <span>
#include <stdexcept>
#include <vector>

#include "qfc/core/state.hpp"
#include "qfc/sme/model.hpp"
#include "qfc/sme/superoperators.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc {

/// Euler-Maruyama adds the Ito terms directly. PositiveKraus applies the
/// first-order measurement operator U (I - sum c^dagger c dt / 2 + sum sqrt(eta) c dY)
/// and the unmonitored part (1 - eta) c rho c^dagger dt, then renormalises; it
/// agrees with Euler-Maruyama to O(dt) and never leaves the positive cone.
enum class StepScheme { EulerMaruyama, PositiveKraus };

namespace detail {

struct CompiledChannel {
  ComplexMatrix c;
  ComplexMatrix cd;
  ComplexMatrix cdc;
  double sqrt_eta = 0.0;
  bool measured = false;
};

/// Per-run precomputation plus scratch space for the step kernel.
///
/// The Hamiltonian part of a step is applied as exp(-i H dt), with H frozen at
/// the left endpoint. The dissipative and measurement parts are plain
/// Euler-Maruyama terms evaluated on the left-endpoint state.
class StepKernel {
 public:
  explicit StepKernel(const SmeModel& model) : model_(model) {
    model_.validate();
    const Index d = model_.dim();
    for (const auto& ch : model_.channels) {
      CompiledChannel cc;
      cc.c = std::sqrt(ch.rate) * ch.op;
      cc.cd = cc.c.adjoint();
      cc.cdc = cc.cd * cc.c;
      cc.sqrt_eta = std::sqrt(ch.efficiency);
      cc.measured = ch.measured();
      channels_.push_back(std::move(cc));
    }
    next_.resize(d, d);
    tmp_.resize(d, d);
    tmp2_.resize(d, d);
    static_h_ = !model_.has_control();
    h_zero_ = static_h_ && max_abs(model_.hamiltonian_base) == 0.0;
  }

  const SmeModel& model() const { return model_; }
  std::size_t measured_count() const { return model_.measured_count(); }

  /// max_n rate_n ||op_n||^2 dt.
  double stiffness(double dt) const {
    double s = 0.0;
    for (const auto& cc : channels_) {
      if (cc.cdc.size() == 0) continue;
      s = std::max(s, hermitian_eigenvalues(cc.cdc).maxCoeff() * dt);
    }
    return s;
  }

  void require_step_size(double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("sme step: dt must be positive");
    const double s = stiffness(dt);
    if (s > 1e-2) {
      std::ostringstream os;
      os << "sme step: rate*||L||^2*dt = " << s << " exceeds 1e-2; reduce dt";
      throw std::invalid_argument(os.str());
    }
  }

  /// Deterministic Lindblad generator at (t, rho).
  ComplexMatrix generator(double t, const ComplexMatrix& rho) const {
    const ComplexMatrix h = model_.hamiltonian(t, rho);
    ComplexMatrix out = Complex(0.0, -1.0) * commutator(h, rho);
    for (const auto& cc : channels_) out += cc.c * rho * cc.cd - 0.5 * (cc.cdc * rho + rho * cc.cdc);
    return out;
  }

  /// One step in place. dw holds one increment per measured channel (may be
  /// empty for an unconditioned step).
  void advance(ComplexMatrix& rho, double t, double dt, std::span<const double> dw, bool renormalize) {
    if (!dw.empty() && dw.size() != measured_count()) {
      throw std::invalid_argument("sme step: one Wiener increment per measured channel required");
    }
    const Index d = rho.rows();
    if (rho.cols() != d || d != model_.dim()) throw DimensionError("sme step: state dimension mismatch");
    // unitary part
    if (h_zero_) {
      next_ = rho;
    } else {
      const ComplexMatrix& u = unitary(t, rho, dt);
      tmp_.noalias() = u * rho;
      next_.noalias() = tmp_ * u.adjoint();
    }
    std::size_t j = 0;
    for (const auto& cc : channels_) {
      tmp_.noalias() = cc.c * rho;  // c rho
      tmp2_.noalias() = tmp_ * cc.cd;
      next_ += dt * tmp2_;
      tmp2_.noalias() = cc.cdc * rho;
      next_ -= (0.5 * dt) * tmp2_;
      tmp2_.noalias() = rho * cc.cdc;
      next_ -= (0.5 * dt) * tmp2_;
      if (cc.measured) {
        const double w = dw.empty() ? 0.0 : dw[j];
        ++j;
        if (w != 0.0) {
          tmp2_.noalias() = rho * cc.cd;  // rho c^dagger
          const Complex e = tmp_.trace() + tmp2_.trace();
          const double a = cc.sqrt_eta * w;
          next_ += a * tmp_;
          next_ += a * tmp2_;
          next_ -= (a * e) * rho;
        }
      }
    }
    finish(rho, renormalize);
  }

  /// Positivity-preserving alternative to advance(); always renormalises.
  void advance_kraus(ComplexMatrix& rho, double t, double dt, std::span<const double> dw) {
    if (!dw.empty() && dw.size() != measured_count()) {
      throw std::invalid_argument("sme step: one Wiener increment per measured channel required");
    }
    const Index d = rho.rows();
    if (rho.cols() != d || d != model_.dim()) throw DimensionError("sme step: state dimension mismatch");
    kraus_ = identity(d);
    std::size_t j = 0;
    for (const auto& cc : channels_) {
      kraus_ -= (0.5 * dt) * cc.cdc;
      if (cc.measured) {
        const double w = dw.empty() ? 0.0 : dw[j];
        ++j;
        if (dw.empty()) continue;
        tmp_.noalias() = cc.c * rho;
        const double mean = 2.0 * tmp_.trace().real();  // <c + c^dagger>
        const double dy = cc.sqrt_eta * mean * dt + w;
        kraus_ += (cc.sqrt_eta * dy) * cc.c;
      }
    }
    if (!h_zero_) kraus_ = unitary(t, rho, dt) * kraus_;
    tmp_.noalias() = kraus_ * rho;
    next_.noalias() = tmp_ * kraus_.adjoint();
    for (const auto& cc : channels_) {
      const double unmonitored = dw.empty() ? 1.0 : 1.0 - cc.sqrt_eta * cc.sqrt_eta;
      if (unmonitored <= 0.0) continue;
      tmp_.noalias() = cc.c * rho;
      tmp2_.noalias() = tmp_ * cc.cd;
      next_ += (unmonitored * dt) * tmp2_;
    }
    finish(rho, true);
  }

  void step(StepScheme scheme, ComplexMatrix& rho, double t, double dt, std::span<const double> dw, bool renormalize) {
    if (scheme == StepScheme::PositiveKraus) {
      advance_kraus(rho, t, dt, dw);
    } else {
      advance(rho, t, dt, dw, renormalize);
    }
  }

 private:
  void finish(ComplexMatrix& rho, bool renormalize) {
    if (!next_.allFinite()) throw IntegrationError("sme step: non-finite state");
    const double tr = next_.trace().real();
    if (!(tr > 1e-12)) throw IntegrationError("sme step: trace collapsed");
    if (renormalize) next_ /= tr;
    rho.swap(next_);
  }

  const ComplexMatrix& unitary(double t, const ComplexMatrix& rho, double dt) {
    if (static_h_) {
      if (dt != cached_dt_) {
        u_ = unitary_from_hamiltonian(model_.hamiltonian_base, dt);
        cached_dt_ = dt;
      }
      return u_;
    }
    u_ = unitary_from_hamiltonian(model_.hamiltonian(t, rho), dt);
    return u_;
  }

  SmeModel model_;
  std::vector<CompiledChannel> channels_;
  ComplexMatrix next_, tmp_, tmp2_, u_, kraus_;
  double cached_dt_ = -1.0;
  bool static_h_ = true;
  bool h_zero_ = false;
};

inline DensityMatrix checked_density(ComplexMatrix m, const Tolerances& tol) {
  return DensityMatrix(hermitian_part(m), tol);
}

} // namespace detail

/// -i[H, rho] + sum_n D[c_n] rho.
inline ComplexMatrix lindblad_generator(const SmeModel& model, double t, const ComplexMatrix& rho) {
  return detail::StepKernel(model).generator(t, rho);
}

/// Unconditioned step on a raw state matrix.
inline ComplexMatrix lindblad_step(const SmeModel& model, const ComplexMatrix& rho, double t, double dt) {
  detail::StepKernel kernel(model);
  kernel.require_step_size(dt);
  ComplexMatrix out = rho;
  kernel.advance(out, t, dt, {}, true);
  if (hermiticity_error(out) > 1e-9) throw StateError("lindblad_step: Hermiticity lost");
  return out;
}

/// Unconditioned step; the result must satisfy the input's density-matrix invariants.
inline DensityMatrix lindblad_step(const SmeModel& model, const DensityMatrix& rho, double t, double dt) {
  return detail::checked_density(lindblad_step(model, rho.matrix(), t, dt), rho.tolerances());
}

/// Conditioned step with one dW per measured channel.
inline ComplexMatrix sme_step(const SmeModel& model, const ComplexMatrix& rho, double t, double dt,
                              std::span<const double> dw, StepScheme scheme = StepScheme::EulerMaruyama) {
  detail::StepKernel kernel(model);
  kernel.require_step_size(dt);
  if (dw.size() != kernel.measured_count()) throw std::invalid_argument("sme_step: one dW per measured channel");
  ComplexMatrix out = rho;
  kernel.step(scheme, out, t, dt, dw, true);
  if (hermiticity_error(out) > 1e-9) throw StateError("sme_step: Hermiticity lost");
  return out;
}

inline DensityMatrix sme_step(const SmeModel& model, const DensityMatrix& rho, double t, double dt,
                              std::span<const double> dw, StepScheme scheme = StepScheme::EulerMaruyama) {
  return detail::checked_density(sme_step(model, rho.matrix(), t, dt, dw, scheme), rho.tolerances());
}

struct TrajectoryOptions {
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t record_every = 1;     // sample stride in steps
  bool renormalize = true;
  std::size_t symmetrize_every = 100;
  bool keep_states = true;
  bool keep_noise = false;
  bool track_min_eigenvalue = false;
  bool unconditioned = false;       // drop the measurement terms (Lindblad path)
  StepScheme scheme = StepScheme::EulerMaruyama;
};

/// Sampled path of one trajectory.
///
/// States are stored as matrices. Euler-Maruyama keeps them Hermitian with unit
/// trace, but near-pure states can leave the positive cone (the excursion
/// shrinks roughly like sqrt(dt)); min_eigenvalue records the worst one when
/// tracking is enabled. The PositiveKraus scheme stays inside the cone.
struct TrajectoryResult {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
  std::vector<std::vector<double>> record;  // cumulative Y per measured channel, per sample
  std::vector<double> noise;                // step-major dW, when kept
  std::size_t measured_channels = 0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_hermiticity_error = 0.0;

  DensityMatrix state(std::size_t i, Tolerances tol = {}) const { return DensityMatrix(states.at(i), tol); }
};

/// Integrates one trajectory from rho0. observer(sample_index, t, rho) runs at
/// every sample, including t = 0.
template <class Observer>
TrajectoryResult run_trajectory(const SmeModel& model, const DensityMatrix& rho0, const TrajectoryOptions& opt,
                                RngStream& rng, Observer&& observer) {
  detail::StepKernel kernel(model);
  kernel.require_step_size(opt.dt);
  if (rho0.dim() != model.dim()) throw DimensionError("run_trajectory: initial state dimension mismatch");
  if (opt.record_every == 0) throw std::invalid_argument("run_trajectory: record_every must be >= 1");
  const std::size_t nm = kernel.measured_count();
  std::vector<double> dw(nm, 0.0), y(nm, 0.0);
  std::vector<ComplexMatrix> ops;
  std::vector<double> sqrt_eta;
  for (const auto& ch : model.channels) {
    if (!ch.measured()) continue;
    const ComplexMatrix c = std::sqrt(ch.rate) * ch.op;
    ops.push_back(c + c.adjoint());
    sqrt_eta.push_back(std::sqrt(ch.efficiency));
  }
  TrajectoryResult res;
  res.measured_channels = nm;
  if (opt.keep_noise) res.noise.reserve(opt.steps * nm);
  ComplexMatrix rho = rho0.matrix();
  std::size_t sample = 0;
  auto take_sample = [&](double t) {
    res.times.push_back(t);
    if (opt.keep_states) res.states.push_back(rho);
    res.record.push_back(y);
    if (opt.track_min_eigenvalue) {
      res.min_eigenvalue = std::min(res.min_eigenvalue, hermitian_eigenvalues(rho).minCoeff());
    }
    observer(sample, t, static_cast<const ComplexMatrix&>(rho));
    ++sample;
  };
  take_sample(0.0);
  const double sdt = std::sqrt(opt.dt);
  for (std::size_t n = 0; n < opt.steps; ++n) {
    const double t = static_cast<double>(n) * opt.dt;
    for (std::size_t j = 0; j < nm; ++j) {
      dw[j] = sdt * rng.normal();
      y[j] += sqrt_eta[j] * expectation(ops[j], rho) * opt.dt + dw[j];
      if (opt.keep_noise) res.noise.push_back(dw[j]);
    }
    kernel.step(opt.scheme, rho, t, opt.dt,
                opt.unconditioned ? std::span<const double>() : std::span<const double>(dw), opt.renormalize);
    if (opt.symmetrize_every > 0 && (n + 1) % opt.symmetrize_every == 0) {
      res.max_hermiticity_error = std::max(res.max_hermiticity_error, hermiticity_error(rho));
      rho = hermitian_part(rho);
    }
    if ((n + 1) % opt.record_every == 0 || n + 1 == opt.steps) take_sample(static_cast<double>(n + 1) * opt.dt);
  }
  res.max_hermiticity_error = std::max(res.max_hermiticity_error, hermiticity_error(rho));
  return res;
}

inline TrajectoryResult run_trajectory(const SmeModel& model, const DensityMatrix& rho0, const TrajectoryOptions& opt,
                                       RngStream& rng) {
  return run_trajectory(model, rho0, opt, rng, [](std::size_t, double, const ComplexMatrix&) {});
}

/// dY - sqrt(M eta) <L + L^dagger> dt; for Hermitian L = F_z this is dY - 2 sqrt(M eta) <F_z> dt.
inline double innovation_increment(double record_dy, const ComplexMatrix& rho, const ComplexMatrix& l, double m_strength,
                                   double eta, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("innovation_increment: dt must be positive");
  return record_dy - std::sqrt(m_strength * eta) * expectation(l + l.adjoint(), rho) * dt;
}

/// Record increment matching innovation_increment: sqrt(M eta) <L + L^dagger> dt + dW.
inline double record_from_innovation(double dw, const ComplexMatrix& rho, const ComplexMatrix& l, double m_strength,
                                     double eta, double dt) {
  return std::sqrt(m_strength * eta) * expectation(l + l.adjoint(), rho) * dt + dw;
}

/// Central difference of Tr(rho^2) along the open-loop generator at time t.
///
/// Requires [H0, L_n] = 0 for every channel; the control Hamiltonian is free.
inline double purity_derivative_check(const SmeModel& model, const ComplexMatrix& rho, double t, double h = 1e-6) {
  model.validate();
  for (const auto& ch : model.channels) {
    if (max_abs(commutator(model.hamiltonian_base, ch.op)) > 1e-10) {
      throw std::invalid_argument("purity_derivative_check: [H0, L] must vanish");
    }
  }
  const ComplexMatrix a = lindblad_generator(model, t, rho);
  const ComplexMatrix plus = rho + h * a;
  const ComplexMatrix minus = rho - h * a;
  return (purity(plus) - purity(minus)) / (2.0 * h);
}

} // namespace qfc

#endif // QFC_SME_INTEGRATOR_HPP
