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

#ifndef QFC_MEASUREMENT_MEASUREMENT_HPP
#define QFC_MEASUREMENT_MEASUREMENT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfc/core/state.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc {

/// Finite Kraus family {M_m} with sum M_m^dagger M_m = I.
class MeasurementOperatorSet {
 public:
  MeasurementOperatorSet(std::vector<ComplexMatrix> operators, std::vector<long> labels,
                         double completeness_tol = 1e-9)
      : ops_(std::move(operators)), labels_(std::move(labels)) {
    if (ops_.empty()) throw std::invalid_argument("MeasurementOperatorSet: no operators");
    if (labels_.size() != ops_.size()) throw std::invalid_argument("MeasurementOperatorSet: one label per operator");
    const Index d = ops_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& m : ops_) {
      require_square(m, "MeasurementOperatorSet");
      if (m.rows() != d) throw DimensionError("MeasurementOperatorSet: operators differ in dimension");
      sum += m.adjoint() * m;
    }
    const double err = max_abs(sum - identity(d));
    if (err > completeness_tol) {
      std::ostringstream os;
      os << "MeasurementOperatorSet: completeness error " << err;
      throw Error(os.str());
    }
  }

  /// Labels 0..n-1.
  explicit MeasurementOperatorSet(std::vector<ComplexMatrix> operators, double completeness_tol = 1e-9)
      : MeasurementOperatorSet(operators, default_labels(operators.size()), completeness_tol) {}

  std::size_t size() const { return ops_.size(); }
  Index dim() const { return ops_.front().rows(); }
  const ComplexMatrix& op(std::size_t i) const { return ops_[i]; }
  long label(std::size_t i) const { return labels_[i]; }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  const std::vector<long>& labels() const { return labels_; }

  double completeness_error() const {
    ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
    for (const auto& m : ops_) sum += m.adjoint() * m;
    return max_abs(sum - identity(dim()));
  }

 private:
  static std::vector<long> default_labels(std::size_t n) {
    std::vector<long> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<long>(i);
    return l;
  }

  std::vector<ComplexMatrix> ops_;
  std::vector<long> labels_;
};

/// Projective measurement in the computational basis of dimension d.
inline MeasurementOperatorSet computational_basis_measurement(Index d) {
  std::vector<ComplexMatrix> ops;
  for (Index i = 0; i < d; ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    p(i, i) = 1.0;
    ops.push_back(std::move(p));
  }
  return MeasurementOperatorSet(std::move(ops));
}

/// Gaussian-weighted projector sum M_m = (1/N_n) sum_n exp(-k (n-m)^2 / 4) |n><n|.
///
/// Each eigenvalue row gets its own normaliser N_n computed over the truncated
/// outcome range, which makes the truncated set exactly complete. Far from the
/// range edges every N_n equals the global N. Throws when the global-N
/// completeness error of the truncation exceeds 1e-6. An empty outcome range
/// selects the eigenvalue span widened by ceil(6 / sqrt(k)) on both sides.
inline MeasurementOperatorSet gaussian_weak_set(double k_strength, const std::vector<long>& eigenvalues,
                                                std::vector<long> outcome_range = {}) {
  if (!(k_strength > 0.0)) throw std::invalid_argument("gaussian_weak_set: k must be positive");
  if (eigenvalues.empty()) throw std::invalid_argument("gaussian_weak_set: no eigenvalues");
  if (outcome_range.empty()) {
    const auto [lo, hi] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
    const long pad = static_cast<long>(std::ceil(6.0 / std::sqrt(k_strength)));
    for (long m = *lo - pad; m <= *hi + pad; ++m) outcome_range.push_back(m);
  }
  const Index d = static_cast<Index>(eigenvalues.size());
  auto weight = [k_strength](long n, long m) {
    const double dn = static_cast<double>(n - m);
    return std::exp(-k_strength * dn * dn / 2.0);  // squared amplitude
  };
  // Untruncated normaliser: sum over all integers m of exp(-k m^2 / 2).
  double global = 0.0;
  {
    const long reach = static_cast<long>(std::ceil(40.0 / std::sqrt(k_strength))) + 1;
    for (long m = -reach; m <= reach; ++m) global += weight(0, m);
  }
  std::vector<double> norm(d, 0.0);
  double worst = 0.0;
  for (Index a = 0; a < d; ++a) {
    for (long m : outcome_range) norm[a] += weight(eigenvalues[a], m);
    worst = std::max(worst, std::abs(norm[a] / global - 1.0));
  }
  if (worst > 1e-6) {
    std::ostringstream os;
    os << "gaussian_weak_set: outcome range too narrow, truncation completeness error " << worst << " > 1e-6";
    throw std::invalid_argument(os.str());
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(outcome_range.size());
  for (long m : outcome_range) {
    ComplexMatrix mm = ComplexMatrix::Zero(d, d);
    for (Index a = 0; a < d; ++a) mm(a, a) = std::sqrt(weight(eigenvalues[a], m) / norm[a]);
    ops.push_back(std::move(mm));
  }
  return MeasurementOperatorSet(std::move(ops), std::move(outcome_range));
}

struct MeasurementOutcome {
  std::size_t index = 0;
  long label = 0;
  DensityMatrix post;
  double probability = 0.0;
};

/// Outcome probabilities Tr(M_m rho M_m^dagger).
inline std::vector<double> outcome_probabilities(const ComplexMatrix& rho, const MeasurementOperatorSet& set) {
  if (rho.rows() != set.dim()) throw DimensionError("outcome_probabilities: dimension mismatch");
  std::vector<double> p(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    p[i] = std::max(0.0, (set.op(i) * rho * set.op(i).adjoint()).trace().real());
  }
  return p;
}

/// Samples one outcome and returns the normalised post-measurement state.
inline MeasurementOutcome apply_measurement(const DensityMatrix& rho, const MeasurementOperatorSet& set,
                                            RngStream& rng) {
  const std::vector<double> p = outcome_probabilities(rho.matrix(), set);
  double total = 0.0;
  for (double v : p) total += v;
  if (std::abs(total - 1.0) > 1e-9) throw StateError("apply_measurement: outcome probabilities do not sum to 1");
  const double u = rng.uniform() * total;
  std::size_t chosen = p.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) {
      chosen = i;
      break;
    }
  }
  // fall back past any trailing zero-probability outcomes
  while (p[chosen] < 1e-12 && chosen > 0) --chosen;
  if (p[chosen] < 1e-12) throw StateError("apply_measurement: sampled an impossible outcome");
  ComplexMatrix post = set.op(chosen) * rho.matrix() * set.op(chosen).adjoint() / p[chosen];
  post = hermitian_part(post);
  post /= post.trace().real();
  return {chosen, set.label(chosen), DensityMatrix(std::move(post), rho.tolerances()), p[chosen]};
}

/// sum_m M_m rho M_m^dagger.
inline DensityMatrix nonselective_measurement(const DensityMatrix& rho, const MeasurementOperatorSet& set) {
  if (rho.dim() != set.dim()) throw DimensionError("nonselective_measurement: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& m : set.operators()) out += m * rho.matrix() * m.adjoint();
  return DensityMatrix(hermitian_part(out), rho.tolerances());
}

/// (4k dt / pi)^{1/4} exp(-2 k dt (X - mu)^2), defined through the spectrum of X.
inline ComplexMatrix continuous_meas_kraus(double k, double dt, const ComplexMatrix& x, double mu) {
  if (!(dt > 0.0)) throw std::invalid_argument("continuous_meas_kraus: dt must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("continuous_meas_kraus: k must be positive");
  require_square(x, "continuous_meas_kraus");
  const double pref = std::pow(4.0 * k * dt / std::numbers::pi, 0.25);
  return spectral_function(x, [&](double e) { return Complex(pref * std::exp(-2.0 * k * dt * (e - mu) * (e - mu)), 0.0); });
}

/// dy = <X> dt + dW / sqrt(8k).
inline double record_increment(double x_expect, double k, double dt, double dw) {
  if (!(dt > 0.0)) throw std::invalid_argument("record_increment: dt must be positive");
  return x_expect * dt + dw / std::sqrt(8.0 * k);
}

/// Inverse of record_increment.
inline double record_innovation(double dy, double x_expect, double k, double dt) {
  return std::sqrt(8.0 * k) * (dy - x_expect * dt);
}

} // namespace qfc

#endif // QFC_MEASUREMENT_MEASUREMENT_HPP
