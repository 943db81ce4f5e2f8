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

#ifndef QFC_CHAOS_LYAPUNOV_HPP
#define QFC_CHAOS_LYAPUNOV_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "qfc/chaos/riemann.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc::chaos {

enum class OrbitMode {
  // iterate F_p forward from z0
  Forward,
  // follow a random inverse branch at each step; stays on the Julia set,
  // where forward orbits are numerically unstable
  Backward,
};

struct LyapunovOptions {
  OrbitMode mode = OrbitMode::Forward;
  double shadow_offset = 1e-9;
  std::uint64_t seed = 1;  // branch choices in Backward mode
};

struct LyapunovEstimate {
  double chain_rule = 0.0;  // (1/n) sum ln |F'| in the chordal metric
  double shadow = 0.0;      // from a renormalised neighbour orbit
  std::size_t n_iters = 0;
  bool hit_critical = false;  // a log term was clamped at ln(DBL_MIN)
};

namespace detail {

inline double clamped_log(double x, bool& clamped) {
  constexpr double floor = std::numeric_limits<double>::min();
  if (!(x > floor)) {
    clamped = true;
    return std::log(floor);
  }
  return std::log(x);
}

/// Point at chordal distance ~d from z, in the direction of `toward` when
/// that is distinct, else along the real axis of the local chart.
inline RiemannPoint offset_point(const RiemannPoint& z, const RiemannPoint& toward, double d) {
  // local chart: w = z near the origin, w = 1/z near infinity
  const bool inv = z.is_infinity() || std::abs(z.value()) > 1.0;
  auto chart = [inv](const RiemannPoint& q) -> Complex {
    if (!inv) return q.is_infinity() ? Complex(std::numeric_limits<double>::max()) : q.value();
    return q.is_infinity() ? Complex(0.0) : 1.0 / q.value();
  };
  const Complex w = chart(z);
  Complex dir = chart(toward) - w;
  const double a = std::abs(dir);
  dir = (a > 0.0 && std::isfinite(a)) ? dir / a : Complex(1.0);
  const Complex w2 = w + dir * (0.5 * d * (1.0 + std::norm(w)));
  if (!inv) return RiemannPoint(w2);
  return w2 == 0.0 ? RiemannPoint::infinity() : RiemannPoint(1.0 / w2);
}

} // namespace detail

/// Lyapunov exponent of F_p along the orbit of z0, by the chain rule and by a
/// shadow orbit started shadow_offset away and renormalised every step.
inline LyapunovEstimate lyapunov_estimate(const RiemannPoint& z0, Complex p, std::size_t n_iters,
                                          const LyapunovOptions& opt = {}) {
  if (n_iters < 1) throw std::invalid_argument("lyapunov_estimate: n_iters must be >= 1");
  if (!(opt.shadow_offset > 0.0 && opt.shadow_offset < 1e-3)) {
    throw std::invalid_argument("lyapunov_estimate: shadow offset must lie in (0, 1e-3)");
  }
  const double d0 = opt.shadow_offset;
  LyapunovEstimate est;
  est.n_iters = n_iters;
  RngStream rng(opt.seed, 0);
  RiemannPoint z = z0;
  RiemannPoint s = detail::offset_point(z, z, d0);
  double sum_chain = 0.0, sum_shadow = 0.0;
  for (std::size_t n = 0; n < n_iters; ++n) {
    RiemannPoint zn, sn;
    if (opt.mode == OrbitMode::Forward) {
      sum_chain += detail::clamped_log(fp_spherical_derivative(z, p), est.hit_critical);
      zn = fp_map(z, p);
      sn = fp_map(s, p);
    } else {
      const auto pre = fp_preimages(z, p);
      zn = rng.bernoulli(0.5) ? pre.first : pre.second;
      // derivative at the preimage: F maps zn back onto z
      sum_chain += detail::clamped_log(fp_spherical_derivative(zn, p), est.hit_critical);
      const auto spre = fp_preimages(s, p);
      sn = chordal_distance(spre.first, zn) <= chordal_distance(spre.second, zn) ? spre.first : spre.second;
    }
    const double d = chordal_distance(zn, sn);
    const double ratio = d / chordal_distance(z, s);
    // backward steps contract by 1/|F'|, so the growth rate flips sign
    const double term = detail::clamped_log(ratio, est.hit_critical);
    sum_shadow += opt.mode == OrbitMode::Forward ? term : -term;
    z = zn;
    s = detail::offset_point(z, sn, d0);
  }
  est.chain_rule = sum_chain / static_cast<double>(n_iters);
  est.shadow = sum_shadow / static_cast<double>(n_iters);
  return est;
}

} // namespace qfc::chaos

#endif // QFC_CHAOS_LYAPUNOV_HPP
