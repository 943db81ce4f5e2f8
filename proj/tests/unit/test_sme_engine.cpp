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
#include <vector>

#include "qfc/core/random_states.hpp"
#include "qfc/protocols/purification.hpp"
#include "qfc/sme/integrator.hpp"
#include "qfc/sme/model.hpp"
#include "qfc/sme/superoperators.hpp"
#include "qfc/stochastic/ensemble.hpp"

namespace {

using namespace qfc;

ComplexMatrix zz() { return tensor_product(pauli_z(), pauli_z()); }

// random state supported on span{|00>, |11>} (sign +1) or span{|01>, |10>} (sign -1)
ComplexMatrix dfs_state(int sign, RngStream& rng) {
  const DensityMatrix small = random_density(2, rng);
  const Index a = sign > 0 ? 0 : 1, b = sign > 0 ? 3 : 2;
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(a, a) = small(0, 0);
  m(a, b) = small(0, 1);
  m(b, a) = small(1, 0);
  m(b, b) = small(1, 1);
  return m;
}

TEST(Dissipator, VanishesInsideDfs) {
  RngStream rng(1, 0);
  for (int sign : {1, -1}) {
    const ComplexMatrix r = dfs_state(sign, rng);
    EXPECT_LT(max_abs(dissipator(zz(), r)), 1e-12);
    EXPECT_LT(max_abs(meas_superop(zz(), r)), 1e-12);
  }
}

TEST(Dissipator, UnitaryOnMaximallyMixed) {
  RngStream rng(2, 0);
  const ComplexMatrix u = random_unitary(4, rng);
  EXPECT_LT(max_abs(dissipator(u, identity(4) / 4.0)), 1e-14);
}

TEST(Superoperators, Traceless) {
  RngStream rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix r = random_density(3, rng).matrix();
    const ComplexMatrix c = random_ginibre(3, 3, rng);
    EXPECT_LT(std::abs(dissipator(c, r).trace()), 1e-10);
    EXPECT_LT(std::abs(meas_superop(c, r).trace()), 1e-10);
  }
}

TEST(MeasSuperop, EigenstateAndKnownCase) {
  RngStream rng(4, 0);
  const ComplexMatrix h = random_hermitian(3, rng);
  const HermitianSpectrum s = hermitian_spectrum(h);
  const ComplexVector v = s.vectors.col(1);
  EXPECT_LT(max_abs(meas_superop(h, v * v.adjoint())), 1e-12);
  EXPECT_LT(max_abs(meas_superop(pauli_z(), identity(2) / 2.0) - pauli_z()), 1e-15);
}

TEST(Superoperators, ShapeMismatchThrows) {
  EXPECT_THROW(dissipator(pauli_z(), identity(3)), DimensionError);
}

TEST(LindbladStep, DephasingCoherenceDecay) {
  const double k = 1.0, dt = 1e-4;
  const SmeModel model = qubit_dephasing_model(k);
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DensityMatrix rho = PureState(plus).density();
  for (int n = 0; n < 10000; ++n) rho = lindblad_step(model, rho, n * dt, dt);
  EXPECT_NEAR(rho(0, 1).real(), 0.5 * std::exp(-4.0 * k), 1e-4);
}

TEST(LindbladStep, ChannelFreeKeepsEntropy) {
  RngStream rng(5, 0);
  SmeModel model;
  model.hamiltonian_base = random_hermitian(4, rng);
  DensityMatrix rho = random_density(4, rng);
  const double s0 = von_neumann_entropy(rho);
  const double dt = 1e-3;
  for (int n = 0; n < 1000; ++n) rho = lindblad_step(model, rho, n * dt, dt);
  EXPECT_NEAR(von_neumann_entropy(rho), s0, 1e-10);
}

TEST(LindbladStep, MaximallyMixedFixedPoint) {
  RngStream rng(6, 0);
  SmeModel model;
  model.hamiltonian_base = ComplexMatrix::Zero(3, 3);
  model.channels.push_back({random_hermitian(3, rng), 0.7, 0.0, "L"});
  const ComplexMatrix mixed = identity(3) / 3.0;
  EXPECT_LT(max_abs(lindblad_step(model, mixed, 0.0, 1e-3) - mixed), 1e-12);
}

TEST(LindbladStep, StepSizeGuard) {
  const SmeModel model = qubit_dephasing_model(10.0);
  EXPECT_THROW(lindblad_step(model, DensityMatrix::maximally_mixed(2), 0.0, 1e-2), std::exception);
}

TEST(SmeStep, UnmonitoredChannelsMatchLindblad) {
  RngStream rng(7, 0);
  SmeModel model;
  model.hamiltonian_base = random_hermitian(3, rng);
  model.channels.push_back({random_hermitian(3, rng), 0.3, 0.0, "a"});
  model.channels.push_back({random_ginibre(3, 3, rng), 0.2, 0.0, "b"});
  const DensityMatrix rho = random_density(3, rng);
  const DensityMatrix a = sme_step(model, rho, 0.0, 1e-3, {});
  const DensityMatrix b = lindblad_step(model, rho, 0.0, 1e-3);
  EXPECT_EQ(a.matrix(), b.matrix());
}

TEST(SmeStep, OneNoisePerMeasuredChannel) {
  const SmeModel model = qubit_dephasing_model(1.0);
  const std::vector<double> two{0.0, 0.0};
  EXPECT_THROW(sme_step(model, DensityMatrix::maximally_mixed(2), 0.0, 1e-3, two), std::invalid_argument);
}

TEST(SmeStep, EnsembleMeanMatchesLindblad) {
  const double k = 1.0, dt = 1e-3;
  const SmeModel model = qubit_dephasing_model(k, 0.8);
  RngStream r0(8, 0);
  const DensityMatrix rho0 = random_density(2, r0);
  TrajectoryOptions opt;
  opt.dt = dt;
  opt.steps = 500;
  opt.record_every = 100;
  opt.keep_states = false;
  const std::size_t samples = opt.steps / opt.record_every + 1;
  const auto stats = run_ensemble(samples, 2, 4000, 9, 1, [&](RngStream& rng, std::span<double> out) {
    run_trajectory(model, rho0, opt, rng, [&](std::size_t s, double, const ComplexMatrix& r) {
      out[2 * s] = r(0, 1).real();
      out[2 * s + 1] = r(0, 0).real();
    });
  });
  TrajectoryOptions det = opt;
  det.unconditioned = true;
  det.keep_states = true;
  RngStream unused(0, 0);
  const auto ref = run_trajectory(model, rho0, det, unused);
  for (std::size_t s = 0; s < samples; ++s) {
    EXPECT_NEAR(stats.mean_at(s, 0), ref.states[s](0, 1).real(), 3.0 * stats.standard_error(s, 0) + 1e-12) << s;
    EXPECT_NEAR(stats.mean_at(s, 1), ref.states[s](0, 0).real(), 3.0 * stats.standard_error(s, 1) + 1e-12) << s;
  }
}

TEST(SmeStep, MatrixFormMatchesBlochForm) {
  const double k = 1.0;
  const SmeModel model = qubit_dephasing_model(k);
  const BlochVector v0(0.3, -0.2, 0.4);
  for (double dt : {1e-3, 5e-4}) {
    const double dw = 0.5 * std::sqrt(dt);
    const std::vector<double> w{dw};
    const DensityMatrix next = sme_step(model, density_from_bloch(v0), 0.0, dt, w);
    const BlochVector a = bloch_from_density(next);
    const BlochVector b = purification::bloch_sme_step(v0, k, dt, dw);
    const double err = std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
    EXPECT_LT(err, 10.0 * dt * dt) << dt;
  }
}

TEST(SmeStep, TraceAndHermiticityOverLongRun) {
  RngStream rng(10, 0);
  const SmeModel model = spin_ensemble_model(3, control_laws::constant(0.4), 0.2, 1.0, 0.8,
                                             Channel{random_hermitian(4, rng), 0.1, 0.0, "extra"});
  TrajectoryOptions opt;
  opt.dt = 5e-4;
  opt.steps = 10000;
  opt.record_every = 1000;
  opt.scheme = StepScheme::PositiveKraus;
  const auto res = run_trajectory(model, random_density(4, rng), opt, rng);
  EXPECT_LT(res.max_hermiticity_error, 1e-9);
  for (const auto& s : res.states) {
    EXPECT_NEAR(s.trace().real(), 1.0, 1e-9);
    EXPECT_NO_THROW(DensityMatrix{s});
  }
}

TEST(SpinModel, CollapseToFzEigenstates) {
  const int two_j = 4;
  const SmeModel model = spin_ensemble_model(two_j, nullptr, 0.0, 1.0, 1.0);
  TrajectoryOptions opt;
  opt.dt = 1e-3;
  opt.steps = 20000;
  opt.record_every = opt.steps;
  opt.scheme = StepScheme::PositiveKraus;
  RngStream rng(11, 0);
  const auto res = run_trajectory(model, DensityMatrix::maximally_mixed(5), opt, rng);
  EXPECT_GT(hermitian_eigenvalues(res.states.back()).maxCoeff(), 0.99);
}

TEST(SpinModel, EigenstateIsFixedPoint) {
  const SmeModel model = spin_ensemble_model(4, nullptr, 0.0, 1.0, 1.0);
  const DensityMatrix e = DensityMatrix::basis(5, 1);
  const std::vector<double> w{0.37};
  EXPECT_LT(max_abs(sme_step(model, e, 0.0, 1e-3, w).matrix() - e.matrix()), 1e-14);
}

TEST(SpinModel, CollapseStatisticsFollowInitialWeights) {
  const int two_j = 2;
  const SmeModel model = spin_ensemble_model(two_j, nullptr, 0.0, 1.0, 1.0);
  const AngularMomentum f = angular_momentum_ops(two_j);
  const ComplexVector top = hermitian_spectrum(f.fx).vectors.col(2);
  const DensityMatrix rho0 = PureState(top).density();  // weights 1/4, 1/2, 1/4
  TrajectoryOptions opt;
  opt.dt = 2e-3;
  opt.steps = 10000;
  opt.record_every = opt.steps;
  opt.keep_states = false;
  opt.scheme = StepScheme::PositiveKraus;
  const auto stats = run_ensemble(1, 3, 600, 12, 1, [&](RngStream& rng, std::span<double> out) {
    run_trajectory(model, rho0, opt, rng, [&](std::size_t s, double, const ComplexMatrix& r) {
      if (s == 1) {
        Index best = 0;
        r.diagonal().real().maxCoeff(&best);
        out[best] = 1.0;
      }
    });
  });
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(stats.mean_at(0, a), rho0(a, a).real(), 3.0 * stats.standard_error(0, a)) << a;
  }
}

TEST(Innovation, RoundTrip) {
  RngStream rng(13, 0);
  const DensityMatrix r = random_density(3, rng);
  const ComplexMatrix fz = angular_momentum_ops(2).fz;
  const double dy = record_from_innovation(0.013, r.matrix(), fz, 1.3, 0.6, 1e-3);
  EXPECT_NEAR(innovation_increment(dy, r.matrix(), fz, 1.3, 0.6, 1e-3), 0.013, 1e-15);
  EXPECT_NEAR(dy - 0.013, 2.0 * std::sqrt(1.3 * 0.6) * expectation(fz, r.matrix()) * 1e-3, 1e-15);
}

TEST(Innovation, ReconstructedNoiseIsWiener) {
  const double m = 1.0, eta = 0.7, dt = 1e-3;
  const SmeModel model = spin_ensemble_model(2, control_laws::constant(0.5), 0.0, m, eta);
  const AngularMomentum f = angular_momentum_ops(2);
  TrajectoryOptions opt;
  opt.dt = dt;
  opt.steps = 5000;
  opt.keep_noise = true;
  opt.scheme = StepScheme::PositiveKraus;
  RngStream rng(14, 0);
  const auto res = run_trajectory(model, DensityMatrix::maximally_mixed(3), opt, rng);
  double sum = 0.0, qv = 0.0, worst = 0.0;
  for (std::size_t n = 0; n < opt.steps; ++n) {
    const double dy = res.record[n + 1][0] - res.record[n][0];
    const double w = innovation_increment(dy, res.states[n], f.fz, m, eta, dt);
    worst = std::max(worst, std::abs(w - res.noise[n]));
    sum += w;
    qv += w * w;
  }
  const double t = opt.steps * dt;
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(sum, 0.0, 4.0 * std::sqrt(t));
  EXPECT_NEAR(qv, t, 4.0 * t * std::sqrt(2.0 / opt.steps));
}

TEST(PurityDerivative, CommutingOpenLoopNeverPurifies) {
  RngStream rng(15, 0);
  for (int i = 0; i < 100; ++i) {
    const double u = 4.0 * rng.uniform() - 2.0;
    SmeModel model;
    model.hamiltonian_base = pauli_z();
    model.control_channel = random_hermitian(2, rng);
    model.control_law = control_laws::constant(u);
    model.channels.push_back({pauli_z(), 0.5 + rng.uniform(), 0.0, "L"});
    EXPECT_LE(purity_derivative_check(model, random_density(2, rng).matrix(), 0.0), 1e-8) << i;
  }
}

TEST(PurityDerivative, ExtremalStates) {
  SmeModel model;
  model.hamiltonian_base = pauli_z();
  model.channels.push_back({pauli_z(), 1.0, 0.0, "L"});
  EXPECT_NEAR(purity_derivative_check(model, identity(2) / 2.0, 0.0), 0.0, 1e-10);
  EXPECT_NEAR(purity_derivative_check(model, DensityMatrix::basis(2, 0).matrix(), 0.0), 0.0, 1e-10);
}

TEST(PurityDerivative, RejectsNonCommuting) {
  SmeModel model;
  model.hamiltonian_base = pauli_x();
  model.channels.push_back({pauli_z(), 1.0, 0.0, "L"});
  EXPECT_THROW(purity_derivative_check(model, identity(2) / 2.0, 0.0), std::invalid_argument);
}

TEST(ControlLaws, PiecewiseAndProportional) {
  const auto pw = control_laws::piecewise_constant({0.0, 1.0, 2.0}, {3.0, 4.0, 5.0});
  const ComplexMatrix r = identity(2) / 2.0;
  EXPECT_EQ(pw(0.5, r), 3.0);
  EXPECT_EQ(pw(1.5, r), 4.0);
  EXPECT_EQ(pw(9.0, r), 5.0);
  const auto prop = control_laws::proportional(2.0, pauli_z(), 0.5);
  EXPECT_NEAR(prop(0.0, DensityMatrix::basis(2, 0).matrix()), -1.0, 1e-15);
}

} // namespace
