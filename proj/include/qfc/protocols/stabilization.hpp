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

#ifndef QFC_PROTOCOLS_STABILIZATION_HPP
#define QFC_PROTOCOLS_STABILIZATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfc/core/state.hpp"
#include "qfc/stochastic/ensemble.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc::stabilization {

inline void require_p(double p) {
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("stabilization: p must lie in [0, 0.5]");
}
inline void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw std::invalid_argument("stabilization: theta must lie in [0, pi/2]");
  }
}
inline void require_chi(double chi) {
  if (!(chi >= 0.0 && chi <= std::numbers::pi / 2)) throw std::invalid_argument("stabilization: chi must lie in [0, pi/2]");
}

struct StabilizationParams {
  double p = 0.115;
  double theta = 0.715;
  double chi = 0.78;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  void validate() const {
    require_p(p);
    require_theta(theta);
    require_chi(chi);
    if (samples < 1) throw std::invalid_argument("stabilization: samples must be >= 1");
  }
};

/// psi_{1,2} = cos(theta/2)|+> +- sin(theta/2)|->, Bloch (cos theta, 0, +-sin theta).
inline PureState input_state(double theta, int which) {
  require_theta(theta);
  if (which != 0 && which != 1) throw std::invalid_argument("input_state: which must be 0 or 1");
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0) * (which == 0 ? 1.0 : -1.0);
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector v(2);
  v << r * (c + s), r * (c - s);
  return PureState(v);
}

/// phi_{+-}: the states prepared after the Helstrom measurement.
inline PureState prepared_state(double theta, int which) {
  require_theta(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double root = std::sqrt(s2 * s2 + std::cos(theta) * std::cos(theta));
  const double shift = (which == 0 ? 1.0 : -1.0) * s2 / (2.0 * root);
  ComplexVector v(2);
  v << std::sqrt(std::max(0.0, 0.5 + shift)), std::sqrt(std::max(0.0, 0.5 - shift));
  return PureState(v);
}

/// p Z rho Z + (1 - p) rho.
inline DensityMatrix dephase(const DensityMatrix& rho, double p) {
  require_p(p);
  if (rho.dim() != 2) throw DimensionError("dephase: qubit state required");
  const ComplexMatrix z = pauli_z();
  return DensityMatrix(p * z * rho.matrix() * z + (1.0 - p) * rho.matrix(), rho.tolerances());
}

/// Sampled dephasing: applies Z with probability p.
inline DensityMatrix dephase(const DensityMatrix& rho, double p, RngStream& rng) {
  require_p(p);
  if (rho.dim() != 2) throw DimensionError("dephase: qubit state required");
  if (!rng.bernoulli(p)) return rho;
  const ComplexMatrix z = pauli_z();
  return DensityMatrix(z * rho.matrix() * z, rho.tolerances());
}

inline double f1_do_nothing(double p, double theta) {
  require_p(p);
  require_theta(theta);
  const double c = std::cos(theta);
  return 1.0 - p * c * c;
}

inline double f2_naive(double theta) {
  require_theta(theta);
  const double s = std::sin(theta);
  return 1.0 - 0.5 * (s * s - s * s * s);
}

inline double f3_discriminate_prepare(double p, double theta) {
  require_p(p);
  require_theta(theta);
  const double s = std::sin(theta), c = std::cos(theta);
  return 0.5 + 0.5 * std::sqrt(s * s * s * s + c * c);
}

inline double helstrom_prob(double theta) {
  require_theta(theta);
  return 0.5 * (1.0 + std::sin(theta));
}

/// Closed-form average fidelity of the weak-measurement feedback scheme.
/// The 0/0 point p = 0, theta = 0 returns its limit 1.
inline double f4_closed(double p, double theta) {
  require_p(p);
  require_theta(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  const double q = 1.0 - 2.0 * p;
  const double den = 1.0 - q * q * c * c;
  if (den <= 1e-300) return 1.0;
  return 0.5 * (1.0 + std::sqrt(c * c + s * s * s * s / den));
}

/// eta = arctan(1 / ((1 - 2p) cos(theta) tan(chi))) in [0, pi/2].
inline double feedback_eta(double p, double theta, double chi) {
  require_p(p);
  require_theta(theta);
  require_chi(chi);
  return std::atan2(1.0, (1.0 - 2.0 * p) * std::cos(theta) * std::tan(chi));
}

/// Z_eta = exp(-i eta sigma_z / 2).
inline ComplexMatrix z_rotation(double eta) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::exp(Complex(0.0, -eta / 2.0));
  m(1, 1) = std::exp(Complex(0.0, eta / 2.0));
  return m;
}

/// Weak sigma_y measurement pair M_0, M_1 of strength chi.
inline std::array<ComplexMatrix, 2> weak_measurement(double chi) {
  require_chi(chi);
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector plus_i(2), minus_i(2);
  plus_i << r, Complex(0.0, r);
  minus_i << r, Complex(0.0, -r);
  const ComplexMatrix pp = plus_i * plus_i.adjoint();
  const ComplexMatrix pm = minus_i * minus_i.adjoint();
  return {std::cos(chi / 2.0) * pp + std::sin(chi / 2.0) * pm, std::sin(chi / 2.0) * pp + std::cos(chi / 2.0) * pm};
}

/// Which rotation follows which outcome.
///
/// Undo: outcome 0 is followed by Z_{-eta} and outcome 1 by Z_{+eta}, which
/// rotates the inferred dephasing kick back and attains the closed-form F4.
/// AsPrinted: outcome 0 by Z_{+eta}, outcome 1 by Z_{-eta}; this adds to the
/// kick instead and is kept only for comparison.
enum class RotationPairing { Undo, AsPrinted };

/// Kraus pair {Z_{-+eta} M_0, Z_{+-eta} M_1}.
inline std::array<ComplexMatrix, 2> feedback_kraus(double p, double theta, double chi,
                                                   RotationPairing pairing = RotationPairing::Undo) {
  const double eta = feedback_eta(p, theta, chi);
  const auto m = weak_measurement(chi);
  const double sign = pairing == RotationPairing::Undo ? -1.0 : 1.0;
  return {z_rotation(sign * eta) * m[0], z_rotation(-sign * eta) * m[1]};
}

/// Non-selective correction channel C[rho].
inline DensityMatrix correction_channel(const DensityMatrix& rho, double p, double theta, double chi,
                                        RotationPairing pairing = RotationPairing::Undo) {
  if (rho.dim() != 2) throw DimensionError("correction_channel: qubit state required");
  const auto k = feedback_kraus(p, theta, chi, pairing);
  ComplexMatrix out = k[0] * rho.matrix() * k[0].adjoint() + k[1] * rho.matrix() * k[1].adjoint();
  return DensityMatrix(hermitian_part(out), rho.tolerances());
}

/// Samples the weak measurement and applies the matching rotation.
inline DensityMatrix weak_feedback_correct(const DensityMatrix& rho, double p, double theta, double chi, RngStream& rng,
                                           RotationPairing pairing = RotationPairing::Undo) {
  if (rho.dim() != 2) throw DimensionError("weak_feedback_correct: qubit state required");
  const auto k = feedback_kraus(p, theta, chi, pairing);
  const ComplexMatrix a = k[0] * rho.matrix() * k[0].adjoint();
  const double p0 = a.trace().real();
  ComplexMatrix out;
  if (rng.uniform() < p0) {
    out = a / p0;
  } else {
    out = k[1] * rho.matrix() * k[1].adjoint();
    out /= out.trace().real();
  }
  return DensityMatrix(hermitian_part(out), rho.tolerances());
}

/// Exact average fidelity of the weak scheme at strength chi.
inline double weak_feedback_fidelity(double p, double theta, double chi,
                                     RotationPairing pairing = RotationPairing::Undo) {
  double f = 0.0;
  for (int i = 0; i < 2; ++i) {
    const PureState psi = input_state(theta, i);
    const DensityMatrix out = correction_channel(dephase(psi.density(), p), p, theta, chi, pairing);
    f += 0.5 * expectation(psi.projector(), out.matrix());
  }
  return f;
}

struct ChiOptimum {
  double chi = 0.0;
  double fidelity = 0.0;
};

/// Golden-section maximisation of weak_feedback_fidelity over chi in [0, pi/2].
inline ChiOptimum optimal_chi(double p, double theta, double tol = 1e-4) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = std::numbers::pi / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = weak_feedback_fidelity(p, theta, c), fd = weak_feedback_fidelity(p, theta, d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = weak_feedback_fidelity(p, theta, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = weak_feedback_fidelity(p, theta, d);
    }
  }
  ChiOptimum best{0.5 * (a + b), weak_feedback_fidelity(p, theta, 0.5 * (a + b))};
  for (double edge : {0.0, std::numbers::pi / 2}) {
    const double fe = weak_feedback_fidelity(p, theta, edge);
    if (fe > best.fidelity) best = {edge, fe};
  }
  return best;
}

/// Pure-state overlap |<a|b>|^2.
inline double overlap2(const ComplexVector& a, const ComplexVector& b) { return std::norm(a.dot(b)); }

namespace detail {

/// Pure-state shot helpers; inputs alternate psi_1, psi_2 by shot index.
inline ComplexVector dephase_shot(const ComplexVector& psi, double p, RngStream& rng) {
  ComplexVector out = psi;
  if (rng.bernoulli(p)) out(1) = -out(1);
  return out;
}

} // namespace detail

/// Monte-Carlo average fidelity of doing nothing.
inline MonteCarloEstimate mc_do_nothing(double p, double theta, std::size_t samples, std::uint64_t seed,
                                        std::size_t threads = 1) {
  require_p(p);
  const std::array<ComplexVector, 2> in{input_state(theta, 0).amplitudes(), input_state(theta, 1).amplitudes()};
  return monte_carlo_mean(samples, seed, threads, [&](RngStream& rng, std::size_t i) {
    const ComplexVector& psi = in[i % 2];
    return overlap2(psi, detail::dephase_shot(psi, p, rng));
  });
}

/// Monte-Carlo average fidelity of Helstrom discrimination and re-preparation.
inline MonteCarloEstimate mc_discriminate_prepare(double p, double theta, std::size_t samples, std::uint64_t seed,
                                                  std::size_t threads = 1) {
  require_p(p);
  const std::array<ComplexVector, 2> in{input_state(theta, 0).amplitudes(), input_state(theta, 1).amplitudes()};
  const std::array<ComplexVector, 2> prep{prepared_state(theta, 0).amplitudes(), prepared_state(theta, 1).amplitudes()};
  return monte_carlo_mean(samples, seed, threads, [&](RngStream& rng, std::size_t i) {
    const ComplexVector& psi = in[i % 2];
    const ComplexVector noisy = detail::dephase_shot(psi, p, rng);
    // Helstrom measurement for this pair is a sigma_z measurement; outcome 0 guesses psi_1
    const int guess = rng.uniform() < std::norm(noisy(0)) ? 0 : 1;
    return overlap2(psi, prep[guess]);
  });
}

/// Monte-Carlo average fidelity of weak measurement plus feedback rotation.
inline MonteCarloEstimate mc_weak_feedback(double p, double theta, double chi, std::size_t samples, std::uint64_t seed,
                                           std::size_t threads = 1, RotationPairing pairing = RotationPairing::Undo) {
  const auto k = feedback_kraus(p, theta, chi, pairing);
  const std::array<ComplexVector, 2> in{input_state(theta, 0).amplitudes(), input_state(theta, 1).amplitudes()};
  return monte_carlo_mean(samples, seed, threads, [&](RngStream& rng, std::size_t i) {
    const ComplexVector& psi = in[i % 2];
    const ComplexVector noisy = detail::dephase_shot(psi, p, rng);
    ComplexVector a = k[0] * noisy;
    const double p0 = a.squaredNorm();
    if (rng.uniform() >= p0) a = k[1] * noisy;
    return overlap2(psi, a) / a.squaredNorm();
  });
}

struct GapRow {
  double p;
  double theta;
  double f1;
  double f3;
  double f4;
  double gap;
};

struct GapGrid {
  double p_min = 0.0;
  double p_max = 0.5;
  std::size_t p_points = 501;
  double theta_min = 0.0;
  double theta_max = std::numbers::pi / 2;
  std::size_t theta_points = 501;

  void validate() const {
    require_p(p_min);
    require_p(p_max);
    require_theta(theta_min);
    require_theta(theta_max);
    if (p_points < 2 || theta_points < 2) throw std::invalid_argument("gap_surface: need at least 2 points per axis");
    if (!(p_max > p_min) || !(theta_max > theta_min)) throw std::invalid_argument("gap_surface: empty grid range");
  }
};

struct GapSurface {
  std::vector<GapRow> rows;  // p-major
  std::size_t p_points = 0;
  std::size_t theta_points = 0;
  double max_gap = 0.0;
  double argmax_p = 0.0;
  double argmax_theta = 0.0;
  double min_gap = 0.0;
  // local refinement of the grid argmax
  double refined_max_gap = 0.0;
  double refined_p = 0.0;
  double refined_theta = 0.0;
};

/// F4 - max(F1, F3).
inline double fidelity_gap(double p, double theta) {
  return f4_closed(p, theta) - std::max(f1_do_nothing(p, theta), f3_discriminate_prepare(p, theta));
}

/// Tabulates the gap on a regular grid, then zooms in around the grid argmax.
inline GapSurface gap_surface(const GapGrid& grid) {
  grid.validate();
  GapSurface s;
  s.p_points = grid.p_points;
  s.theta_points = grid.theta_points;
  s.rows.reserve(grid.p_points * grid.theta_points);
  const double dp = (grid.p_max - grid.p_min) / static_cast<double>(grid.p_points - 1);
  const double dth = (grid.theta_max - grid.theta_min) / static_cast<double>(grid.theta_points - 1);
  s.max_gap = -std::numeric_limits<double>::infinity();
  s.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.p_points; ++i) {
    const double p = i + 1 == grid.p_points ? grid.p_max : grid.p_min + dp * static_cast<double>(i);
    for (std::size_t j = 0; j < grid.theta_points; ++j) {
      const double th = j + 1 == grid.theta_points ? grid.theta_max : grid.theta_min + dth * static_cast<double>(j);
      GapRow r{p, th, f1_do_nothing(p, th), f3_discriminate_prepare(p, th), f4_closed(p, th), 0.0};
      r.gap = r.f4 - std::max(r.f1, r.f3);
      if (r.gap > s.max_gap) {
        s.max_gap = r.gap;
        s.argmax_p = p;
        s.argmax_theta = th;
      }
      s.min_gap = std::min(s.min_gap, r.gap);
      s.rows.push_back(r);
    }
  }
  // zoom: 21x21 sub-grids over +-2 cells, shrinking 5x per round
  double cp = s.argmax_p, ct = s.argmax_theta, hp = 2.0 * dp, ht = 2.0 * dth, best = s.max_gap;
  for (int round = 0; round < 12; ++round) {
    double np = cp, nt = ct;
    for (int a = -10; a <= 10; ++a) {
      for (int b = -10; b <= 10; ++b) {
        const double p = std::clamp(cp + hp * a / 10.0, 0.0, 0.5);
        const double th = std::clamp(ct + ht * b / 10.0, 0.0, std::numbers::pi / 2);
        const double g = fidelity_gap(p, th);
        if (g > best) {
          best = g;
          np = p;
          nt = th;
        }
      }
    }
    cp = np;
    ct = nt;
    hp /= 5.0;
    ht /= 5.0;
  }
  s.refined_max_gap = best;
  s.refined_p = cp;
  s.refined_theta = ct;
  return s;
}

} // namespace qfc::stabilization

#endif // QFC_PROTOCOLS_STABILIZATION_HPP
