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

#ifndef QFC_PROTOCOLS_PURIFICATION_HPP
#define QFC_PROTOCOLS_PURIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qfc/core/state.hpp"
#include "qfc/stochastic/ensemble.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc::purification {

/// Bloch-coordinate step of the sigma_z monitoring SME; the result is pulled
/// back onto the unit ball if the step overshoots.
inline BlochVector bloch_sme_step(const BlochVector& v, double k, double dt, double dw) {
  const double s8k = std::sqrt(8.0 * k);
  const double shrink = 4.0 * k * dt + v.z * s8k * dw;
  double x = v.x - shrink * v.x;
  double y = v.y - shrink * v.y;
  double z = v.z + (1.0 - v.z * v.z) * s8k * dw;
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) throw IntegrationError("bloch_sme_step: non-finite");
  const double n2 = x * x + y * y + z * z;
  if (n2 > 1.0) {
    const double n = std::sqrt(n2);
    x /= n;
    y /= n;
    z /= n;
  }
  return BlochVector(x, y, z);
}

/// (1 - |v|^2) / 2.
inline double impurity(const BlochVector& v) { return std::clamp(0.5 * (1.0 - v.norm_squared()), 0.0, 0.5); }

/// Mean impurity without feedback, starting from the maximally mixed state:
/// e^{-4kt} / sqrt(8 pi) * int exp(-u^2/2) / cosh(sqrt(8kt) u) du.
inline double nofeedback_impurity(double t, double k) {
  if (!(t >= 0.0) || !(k > 0.0)) throw std::invalid_argument("nofeedback_impurity: need t >= 0 and k > 0");
  if (t == 0.0) return 0.5;
  const double a = std::sqrt(8.0 * k * t);
  auto f = [a](double u) {
    const double x = a * u;  // u >= 0
    const double e = std::exp(-x);
    return std::exp(-0.5 * u * u) * 2.0 * e / (1.0 + e * e);
  };
  double err = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-14, &err);
  return std::exp(-4.0 * k * t) * 2.0 * half / std::sqrt(8.0 * std::numbers::pi);
}

enum class FeedbackMode {
  // evolve |v|^2 with its Ito drift at a_z = 0 and keep the vector on the equator
  IdealLength,
  // literal Bloch step followed by a rotation back to the equator
  RotateAfterStep,
  // as RotateAfterStep, but the rotation per step is capped at 2 mu_max dt
  BoundedRotation,
};

struct PurificationRun {
  double k = 1.0;
  double dt = 1e-4;
  double horizon = 2.0;
  bool feedback = true;
  double target_impurity = 1e-3;
  std::uint64_t seed = 1;
  BlochVector initial{};
  FeedbackMode mode = FeedbackMode::IdealLength;
  double mu_max = 10.0;
  std::size_t record_every = 1;

  void validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("PurificationRun: k must be positive");
    if (!(dt > 0.0) || dt * k > 1e-3 + 1e-15) throw std::invalid_argument("PurificationRun: need 0 < k dt <= 1e-3");
    if (!(horizon > 0.0)) throw std::invalid_argument("PurificationRun: horizon must be positive");
    if (!(target_impurity > 0.0 && target_impurity < 0.5)) {
      throw std::invalid_argument("PurificationRun: target impurity must lie in (0, 1/2)");
    }
    if (record_every == 0) throw std::invalid_argument("PurificationRun: record_every must be >= 1");
    if (mode == FeedbackMode::BoundedRotation && !(mu_max > 0.0)) {
      throw std::invalid_argument("PurificationRun: mu_max must be positive");
    }
  }
};

struct PurificationPath {
  std::vector<double> times;
  std::vector<double> impurity;
  std::vector<BlochVector> bloch;
};

namespace detail {

/// Azimuth convention Phi = atan2(a_x, a_y); falls back when the transverse part vanishes.
inline double azimuth(const BlochVector& v, double fallback) {
  const double t = std::hypot(v.x, v.y);
  return t > 1e-300 ? std::atan2(v.x, v.y) : fallback;
}

inline BlochVector on_equator(double length, double phi) {
  length = std::min(length, 1.0);
  return BlochVector(length * std::sin(phi), length * std::cos(phi), 0.0);
}

/// Rotates v in its meridian plane towards the equator by at most max_angle.
inline BlochVector meridian_rotate(const BlochVector& v, double phi, double max_angle) {
  const double t = std::hypot(v.x, v.y);
  const double r = v.norm();
  double lat = std::atan2(v.z, t);  // latitude
  const double step = std::min(std::abs(lat), max_angle);
  lat -= std::copysign(step, lat);
  const double tr = r * std::cos(lat);
  const double z = r * std::sin(lat);
  const double n = std::min(1.0, std::sqrt(tr * tr + z * z)) / std::max(r, 1e-300);
  return BlochVector(n * tr * std::sin(phi), n * tr * std::cos(phi), n * z);
}

} // namespace detail

/// Impurity path under Jacobs-style feedback that keeps the Bloch vector on the
/// equator. In IdealLength mode the path does not depend on the seed.
inline PurificationPath feedback_purify(const PurificationRun& run) {
  run.validate();
  if (!run.feedback) throw std::invalid_argument("feedback_purify: run.feedback must be true");
  RngStream rng(run.seed, 0);
  const std::size_t steps = static_cast<std::size_t>(std::llround(run.horizon / run.dt));
  const double sdt = std::sqrt(run.dt);
  double phi = detail::azimuth(run.initial, 0.0);
  BlochVector v = run.initial;
  if (run.mode == FeedbackMode::IdealLength) v = detail::on_equator(v.norm(), phi);
  PurificationPath path;
  auto record = [&](double t) {
    path.times.push_back(t);
    path.impurity.push_back(impurity(v));
    path.bloch.push_back(v);
  };
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double dw = sdt * rng.normal();
    switch (run.mode) {
      case FeedbackMode::IdealLength: {
        // d|v|^2 = 8k(1 - a_z^2)(1 - a_z^2 - Delta^2) dt + 2 sqrt(8k) a_z (...) dW, at a_z = 0
        const double r2 = v.norm_squared();
        const double next = std::min(1.0, r2 + 8.0 * run.k * (1.0 - r2) * run.dt);
        v = detail::on_equator(std::sqrt(next), phi);
        break;
      }
      case FeedbackMode::RotateAfterStep: {
        const BlochVector w = bloch_sme_step(v, run.k, run.dt, dw);
        phi = detail::azimuth(w, phi);
        v = detail::on_equator(w.norm(), phi);
        break;
      }
      case FeedbackMode::BoundedRotation: {
        const BlochVector w = bloch_sme_step(v, run.k, run.dt, dw);
        phi = detail::azimuth(w, phi);
        v = detail::meridian_rotate(w, phi, 2.0 * run.mu_max * run.dt);
        break;
      }
    }
    if ((n + 1) % run.record_every == 0 || n + 1 == steps) record(static_cast<double>(n + 1) * run.dt);
  }
  return path;
}

/// p(0) e^{-8kt}.
inline double feedback_impurity_closed(double t, double k, double p0 = 0.5) { return p0 * std::exp(-8.0 * k * t); }

/// Ensemble of open-loop Bloch trajectories from the origin; impurity is
/// sampled every `record_every` steps (sample 0 is t = 0).
inline EnsembleStatistics nofeedback_ensemble(double k, double dt, double horizon, std::size_t record_every,
                                              std::size_t n_traj, std::uint64_t seed, std::size_t threads = 1) {
  if (!(k > 0.0) || !(dt > 0.0) || !(horizon > 0.0) || record_every == 0) {
    throw std::invalid_argument("nofeedback_ensemble: invalid parameters");
  }
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t samples = steps / record_every + 1;
  const double sdt = std::sqrt(dt);
  return run_ensemble(samples, 1, n_traj, seed, threads, [&](RngStream& rng, std::span<double> out) {
    BlochVector v;
    out[0] = impurity(v);
    for (std::size_t n = 0; n < steps; ++n) {
      v = bloch_sme_step(v, k, dt, sdt * rng.normal());
      if ((n + 1) % record_every == 0) out[(n + 1) / record_every] = impurity(v);
    }
  });
}

struct Speedup {
  double t_qf = 0.0;  // feedback time to target
  double t_cl = 0.0;  // open-loop time to target
  double ratio = 0.0;
};

/// Time-to-target ratio t_qf / t_cl; t_cl by bisection to 1e-4 in k t units.
inline Speedup speedup_ratio(double target, double k, double horizon_kt = 50.0) {
  if (!(target > 0.0 && target <= 1e-2)) throw std::invalid_argument("speedup_ratio: target must lie in (0, 1e-2]");
  if (!(k > 0.0)) throw std::invalid_argument("speedup_ratio: k must be positive");
  if (nofeedback_impurity(horizon_kt / k, k) > target) {
    std::ostringstream os;
    os << "speedup_ratio: target " << target << " not reached within k t = " << horizon_kt;
    throw Error(os.str());
  }
  double lo = 0.0, hi = horizon_kt;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (nofeedback_impurity(mid / k, k) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Speedup s;
  s.t_cl = 0.5 * (lo + hi) / k;
  s.t_qf = std::log(0.5 / target) / (8.0 * k);
  s.ratio = s.t_qf / s.t_cl;
  return s;
}

} // namespace qfc::purification

#endif // QFC_PROTOCOLS_PURIFICATION_HPP
