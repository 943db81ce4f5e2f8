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

#ifndef QFC_CHAOS_RIEMANN_HPP
#define QFC_CHAOS_RIEMANN_HPP

#include <cmath>
#include <limits>

#include "qfc/core/linalg.hpp"
#include "qfc/core/state.hpp"

namespace qfc::chaos {

/// Point of C u {inf}. The state is N(z|0> + |1>); infinity is |0>.
class RiemannPoint {
 public:
  RiemannPoint() = default;
  RiemannPoint(Complex z) : z_(z) {  // NOLINT: implicit on purpose
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) infinite_ = true, z_ = 0.0;
  }
  static RiemannPoint infinity() {
    RiemannPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinity() const { return infinite_; }
  Complex value() const { return z_; }

  /// Unit-norm homogeneous coordinates (z1, z2) with z = z1 / z2.
  std::pair<Complex, Complex> lift() const {
    if (infinite_) return {1.0, 0.0};
    const double a = std::abs(z_);
    if (a <= 1.0) {
      const double n = std::sqrt(1.0 + a * a);
      return {z_ / n, 1.0 / n};
    }
    // divide through by z to stay finite for huge |z|
    const Complex w = 1.0 / z_;
    const double n = std::sqrt(1.0 + std::norm(w));
    return {1.0 / n, w / n};
  }

  static RiemannPoint from_lift(Complex z1, Complex z2) {
    if (z2 == 0.0) return infinity();
    return RiemannPoint(z1 / z2);
  }

 private:
  Complex z_ = 0.0;
  bool infinite_ = false;
};

/// p = tan x e^{i phi}.
inline Complex map_parameter(double x, double phi) { return std::tan(x) * std::polar(1.0, phi); }

namespace detail {

inline std::pair<Complex, Complex> normalize_lift(Complex a, Complex b) {
  const double s = std::max(std::abs(a), std::abs(b));
  if (s == 0.0 || !std::isfinite(s)) return {a, b};
  a /= s;
  b /= s;
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

/// [z1^2 + p z2^2 : z2^2 - p* z1^2] on a unit lift.
inline std::pair<Complex, Complex> fp_lift(const std::pair<Complex, Complex>& z, Complex p) {
  const Complex a = z.first * z.first, b = z.second * z.second;
  return {a + p * b, b - std::conj(p) * a};
}

} // namespace detail

/// F_p(z) = (z^2 + p) / (1 - p* z^2), extended to the sphere.
inline RiemannPoint fp_map(const RiemannPoint& z, Complex p) {
  const auto w = detail::fp_lift(z.lift(), p);
  return RiemannPoint::from_lift(w.first, w.second);
}

/// |F_p'(z)| = 2|z|(1+|p|^2)/|1 - p* z^2|^2; +inf at poles and at infinity.
inline double fp_derivative_abs(const RiemannPoint& z, Complex p) {
  if (z.is_infinity()) return p == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const Complex v = z.value();
  const double den = std::norm(1.0 - std::conj(p) * v * v);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::abs(v) * (1.0 + std::norm(p)) / den;
}

/// Derivative in the chordal metric; finite everywhere, zero at the critical points 0 and infinity.
inline double fp_spherical_derivative(const RiemannPoint& z, Complex p) {
  const auto l = z.lift();
  const auto w = detail::fp_lift(l, p);
  return 2.0 * std::abs(l.first * l.second) * (1.0 + std::norm(p)) / (std::norm(w.first) + std::norm(w.second));
}

/// 2|z1 w2 - z2 w1| on unit lifts; lies in [0, 2].
inline double chordal_distance(const RiemannPoint& a, const RiemannPoint& b) {
  const auto x = a.lift(), y = b.lift();
  return 2.0 * std::abs(x.first * y.second - x.second * y.first);
}

/// The two solutions of F_p(z) = w: z^2 = [w1 - p w2 : w2 + p* w1].
inline std::pair<RiemannPoint, RiemannPoint> fp_preimages(const RiemannPoint& w, Complex p) {
  const auto l = w.lift();
  const auto [a, b] = detail::normalize_lift(l.first - p * l.second, l.second + std::conj(p) * l.first);
  const Complex ra = std::sqrt(a), rb = std::sqrt(b);
  return {RiemannPoint::from_lift(ra, rb), RiemannPoint::from_lift(-ra, rb)};
}

inline ComplexVector state_from_point(const RiemannPoint& z) {
  const auto l = z.lift();
  ComplexVector v(2);
  v << l.first, l.second;
  return v;
}

/// Chart of a pure qubit state: z = psi_0 / psi_1.
inline RiemannPoint point_from_state(const ComplexVector& psi) {
  if (psi.size() != 2) throw DimensionError("point_from_state: qubit state required");
  return RiemannPoint::from_lift(psi(0), psi(1));
}

} // namespace qfc::chaos

#endif // QFC_CHAOS_RIEMANN_HPP
