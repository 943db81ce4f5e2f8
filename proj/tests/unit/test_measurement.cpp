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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qfc/core/random_states.hpp"
#include "qfc/measurement/measurement.hpp"

namespace {

using namespace qfc;

std::size_t index_of(const MeasurementOperatorSet& set, long label) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.label(i) == label) return i;
  }
  throw std::out_of_range("label");
}

DensityMatrix post_state(const MeasurementOperatorSet& set, std::size_t i, const DensityMatrix& rho) {
  ComplexMatrix m = set.op(i) * rho.matrix() * set.op(i).adjoint();
  return DensityMatrix(hermitian_part(m / m.trace().real()));
}

// trapezoid on a wide uniform grid; the integrands are smooth Gaussians
template <class Fn>
double integrate(Fn f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * h);
  return s * h;
}

TEST(GaussianWeakSet, CompleteAndPeakedOnMixedState) {
  const double k = 0.7;
  const std::vector<long> ev{-2, -1, 0, 1, 2};
  const auto set = gaussian_weak_set(k, ev);
  EXPECT_LT(set.completeness_error(), 1e-9);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(5);
  for (long m : {-1L, 0L, 3L}) {
    const DensityMatrix post = post_state(set, index_of(set, m), mixed);
    RealVector w(5);
    for (int a = 0; a < 5; ++a) w(a) = std::exp(-k * std::pow(ev[a] - m, 2) / 2.0);
    w /= w.sum();
    for (int a = 0; a < 5; ++a) EXPECT_NEAR(post(a, a).real(), w(a), 1e-9) << m << ' ' << a;
    EXPECT_LT(max_abs(post.matrix() - ComplexMatrix(post.matrix().diagonal().asDiagonal())), 1e-15);
  }
}

TEST(GaussianWeakSet, StrongLimitProjects) {
  const auto set = gaussian_weak_set(50.0, {0, 1, 2});
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
  for (long m : {0L, 1L, 2L}) {
    EXPECT_GT(post_state(set, index_of(set, m), mixed)(m, m).real(), 0.999);
  }
}

TEST(GaussianWeakSet, WeakLimitBarelyDisturbs) {
  const auto set = gaussian_weak_set(1e-4, {0, 1, 2});
  RngStream rng(1, 0);
  const DensityMatrix psi = random_pure_state(3, rng).density();
  for (long m : {-100L, 1L, 250L}) {
    EXPECT_GT(fidelity_trace(psi, post_state(set, index_of(set, m), psi)), 0.999);
  }
}

TEST(GaussianWeakSet, NarrowRangeRejected) {
  EXPECT_THROW(gaussian_weak_set(0.1, {0, 1}, {0, 1}), std::invalid_argument);
}

TEST(ApplyMeasurement, ProjectiveOnBasisState) {
  const auto set = computational_basis_measurement(2);
  RngStream rng(2, 0);
  for (int i = 0; i < 20; ++i) {
    const auto out = apply_measurement(DensityMatrix::basis(2, 0), set, rng);
    EXPECT_EQ(out.index, 0u);
    EXPECT_NEAR(out.probability, 1.0, 1e-15);
    EXPECT_LT(max_abs(out.post.matrix() - DensityMatrix::basis(2, 0).matrix()), 1e-15);
  }
}

TEST(ApplyMeasurement, PlusStateIsFair) {
  const auto set = computational_basis_measurement(2);
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto p = outcome_probabilities(PureState(plus).projector(), set);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(ApplyMeasurement, FrequenciesWithinThreeSigma) {
  RngStream rng(3, 0);
  const DensityMatrix rho = random_density(4, rng);
  const auto set = gaussian_weak_set(1.5, {0, 1, 2, 3});
  const auto p = outcome_probabilities(rho.matrix(), set);
  std::vector<int> counts(set.size(), 0);
  const int shots = 100000;
  for (int s = 0; s < shots; ++s) {
    const auto out = apply_measurement(rho, set, rng);
    ++counts[out.index];
    if (s < 100) {
      EXPECT_NEAR(out.post.matrix().trace().real(), 1.0, 1e-12);
      EXPECT_LT(hermiticity_error(out.post.matrix()), 1e-12);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p[i];
    const double sigma = std::sqrt(shots * p[i] * (1.0 - p[i]));
    EXPECT_LE(std::abs(counts[i] - shots * p[i]), 3.0 * sigma + 1.0) << "outcome " << set.label(i);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(ApplyMeasurement, NonselectiveAverage) {
  RngStream rng(4, 0);
  const DensityMatrix rho = random_density(3, rng);
  const auto set = gaussian_weak_set(0.8, {0, 1, 2});
  const auto p = outcome_probabilities(rho.matrix(), set);
  ComplexMatrix avg = ComplexMatrix::Zero(3, 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (p[i] > 1e-14) avg += p[i] * post_state(set, i, rho).matrix();
  }
  const DensityMatrix ch = nonselective_measurement(rho, set);
  EXPECT_LT(max_abs(avg - ch.matrix()), 1e-12);
  EXPECT_NEAR(ch.matrix().trace().real(), 1.0, 1e-12);
}

TEST(ContinuousKraus, MeanOfRecordEqualsExpectation) {
  const double k = 1.0, dt = 0.05;
  RngStream rng(5, 0);
  const DensityMatrix rho = random_density(3, rng);
  ComplexMatrix x = ComplexMatrix::Zero(3, 3);
  x.diagonal() << -1.0, 0.5, 2.0;
  const ComplexMatrix u = random_unitary(3, rng);
  x = u * x * u.adjoint();
  auto prob = [&](double mu) {
    const ComplexMatrix m = continuous_meas_kraus(k, dt, x, mu);
    return trace_of_product(m.adjoint() * m, rho.matrix()).real();
  };
  EXPECT_NEAR(integrate(prob, -15, 15), 1.0, 1e-9);
  EXPECT_NEAR(integrate([&](double mu) { return mu * prob(mu); }, -15, 15), expectation(x, rho.matrix()), 1e-8);
}

TEST(ContinuousKraus, EigenstateGivesGaussian) {
  const double k = 2.0, dt = 0.01;
  const ComplexMatrix z = pauli_z();
  const ComplexMatrix up = DensityMatrix::basis(2, 0).matrix();
  const double var = 1.0 / (8.0 * k * dt);
  for (double mu : {-3.0, 0.0, 1.0, 2.5}) {
    const ComplexMatrix m = continuous_meas_kraus(k, dt, z, mu);
    const double p = trace_of_product(m.adjoint() * m, up).real();
    const double g = std::exp(-(mu - 1.0) * (mu - 1.0) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
    EXPECT_NEAR(p, g, 1e-12);
  }
}

TEST(ContinuousKraus, MixedStateIsTwoGaussianMixture) {
  const double k = 1.0, dt = 0.1;
  const double var = 1.0 / (8.0 * k * dt);
  const ComplexMatrix half = identity(2) / 2.0;
  auto g = [var](double x) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var); };
  for (double mu : {-2.0, -0.3, 0.0, 1.7}) {
    const ComplexMatrix m = continuous_meas_kraus(k, dt, pauli_z(), mu);
    EXPECT_NEAR(trace_of_product(m.adjoint() * m, half).real(), 0.5 * (g(mu - 1) + g(mu + 1)), 1e-12);
  }
}

TEST(ContinuousKraus, DegenerateObservable) {
  const ComplexMatrix zz = tensor_product(pauli_z(), pauli_z());
  const ComplexMatrix m = continuous_meas_kraus(1.0, 0.1, zz, 0.4);
  // function of the eigenvalue only: equal on each degenerate block
  EXPECT_NEAR(std::abs(m(0, 0) - m(3, 3)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(m(1, 1) - m(2, 2)), 0.0, 1e-14);
  EXPECT_LT(max_abs(m - ComplexMatrix(m.diagonal().asDiagonal())), 1e-14);
}

TEST(Record, IncrementAndInnovation) {
  EXPECT_DOUBLE_EQ(record_increment(0.3, 2.0, 1e-3, 0.0), 0.3e-3);
  const double dy = record_increment(-0.4, 1.5, 1e-3, 0.021);
  EXPECT_NEAR(record_innovation(dy, -0.4, 1.5, 1e-3), 0.021, 1e-15);
  EXPECT_THROW(record_increment(0.0, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Record, MeanRateIsExpectation) {
  RngStream rng(6, 0);
  const double k = 1.0, dt = 1e-3, x = 0.37;
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += record_increment(x, k, dt, std::sqrt(dt) * rng.normal());
  const double se = 1.0 / std::sqrt(8.0 * k * dt * n);
  EXPECT_NEAR(s / (n * dt), x, 3.0 * se);
}

} // namespace
