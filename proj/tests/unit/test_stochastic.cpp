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

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qfc/stochastic/ensemble.hpp"
#include "qfc/stochastic/rng.hpp"
#include "qfc/stochastic/sde.hpp"

namespace {

using namespace qfc;

TEST(Wiener, MeanAndVariance) {
  RngStream rng(1, 0);
  const std::size_t n = 1000000;
  const double dt = 1e-3;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = wiener_increment(rng, dt).dw;
    s += w;
    s2 += w * w;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 4e-4);
  EXPECT_NEAR(var, dt, 0.05 * dt);
}

TEST(Wiener, SameSeedSameSequence) {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= x != c.normal();
  }
  EXPECT_TRUE(differs);
}

TEST(Wiener, RejectsNonPositiveDt) {
  RngStream rng(1, 0);
  EXPECT_THROW(wiener_increment(rng, 0.0), std::invalid_argument);
}

TEST(QuadraticVariation, ConvergesToElapsedTime) {
  RngStream rng(2, 0);
  const std::size_t n = 1000000;
  EXPECT_NEAR(ito_quadratic_variation(rng, 1.0, n), 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(QuadraticVariation, SingleStepIsChiSquare) {
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    RngStream rng(3, i);
    const double q = ito_quadratic_variation(rng, 1.0, 1);
    s += q;
    s2 += q * q;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 1.0, 3.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(var, 2.0, 0.2);
}

TEST(QuadraticVariation, SpreadShrinksAsRootN) {
  std::vector<double> sd;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    double s = 0.0, s2 = 0.0;
    const int seeds = 100;
    for (int k = 0; k < seeds; ++k) {
      RngStream rng(4, k);
      const double q = ito_quadratic_variation(rng, 1.0, n);
      s += q;
      s2 += q * q;
    }
    const double mean = s / seeds;
    sd.push_back(std::sqrt(s2 / seeds - mean * mean));
    EXPECT_NEAR(mean, 1.0, 4.0 * std::sqrt(2.0 / n / seeds));
  }
  // each decade of n divides the spread by about sqrt(10)
  EXPECT_NEAR(sd[0] / sd[1], std::sqrt(10.0), 1.2);
  EXPECT_NEAR(sd[1] / sd[2], std::sqrt(10.0), 1.2);
}

TEST(EulerMaruyama, ConstantDriftIsExact) {
  RealVector x = RealVector::Constant(1, 2.0);
  const double dt = 0.01;
  for (int i = 0; i < 100; ++i) {
    x = euler_maruyama_step(
        x, [](const RealVector&) { return RealVector::Constant(1, 0.5); },
        [](const RealVector&) { return RealVector::Zero(1); }, dt, 0.3);
  }
  EXPECT_NEAR(x(0), 2.5, 1e-12);
}

TEST(EulerMaruyama, PureDiffusionVariance) {
  const auto stats = run_ensemble(1, 1, 4000, 5, 1, [](RngStream& rng, std::span<double> out) {
    RealVector x = RealVector::Zero(1);
    const double dt = 1e-2;
    for (int i = 0; i < 100; ++i) {
      x = euler_maruyama_step(
          x, [](const RealVector& v) { return RealVector::Zero(v.size()); },
          [](const RealVector& v) { return RealVector::Ones(v.size()); }, dt, wiener_increment(rng, dt).dw);
    }
    out[0] = x(0) * x(0);
  });
  EXPECT_NEAR(stats.mean_at(0, 0), 1.0, 3.0 * stats.standard_error(0, 0));
}

TEST(EulerMaruyama, LinearGrowthMatchesExponential) {
  const double a = 1.3, dt = 1e-4;
  RealVector x = RealVector::Ones(1);
  for (int i = 0; i < 10000; ++i) {
    x = euler_maruyama_step(
        x, [a](const RealVector& v) { return RealVector(a * v); },
        [](const RealVector& v) { return RealVector::Zero(v.size()); }, dt, 0.0);
  }
  const double exact = std::exp(a);
  EXPECT_LT(std::abs(x(0) - exact) / exact, a * a * dt);
}

TEST(EulerMaruyama, NonFiniteThrows) {
  RealVector x = RealVector::Ones(1);
  EXPECT_THROW(euler_maruyama_step(
                   x, [](const RealVector&) { return RealVector::Constant(1, INFINITY); },
                   [](const RealVector& v) { return RealVector::Zero(v.size()); }, 0.1, 0.0),
               IntegrationError);
}

TEST(Ensemble, SingleTrajectoryIsThatPath) {
  auto traj = [](RngStream& rng, std::span<double> out) {
    out[0] = rng.normal();
    out[1] = rng.normal();
  };
  const auto s = run_ensemble(2, 1, 1, 9, 1, traj);
  RngStream rng(9, 0);
  const double a = rng.normal(), b = rng.normal();
  EXPECT_EQ(s.mean_at(0, 0), a);
  EXPECT_EQ(s.mean_at(1, 0), b);
  EXPECT_EQ(s.variance_at(0, 0), 0.0);
}

TEST(Ensemble, IndependentOfThreadCount) {
  auto traj = [](RngStream& rng, std::span<double> out) {
    double w = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      w += rng.normal();
      out[i] = w;
    }
  };
  const auto a = run_ensemble(5, 1, 1000, 11, 1, traj);
  const auto b = run_ensemble(5, 1, 1000, 11, 4, traj);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(Ensemble, ErrorCarriesTrajectoryIndex) {
  auto traj = [](RngStream& rng, std::span<double> out) {
    if (rng.stream_id() == 137 || rng.stream_id() == 600) throw std::runtime_error("boom");
    out[0] = 0.0;
  };
  for (std::size_t threads : {1u, 3u}) {
    try {
      run_ensemble(1, 1, 1000, 1, threads, traj);
      FAIL() << "no exception";
    } catch (const EnsembleError& e) {
      EXPECT_EQ(e.trajectory_index(), 137u);
      EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
  }
}

TEST(Ensemble, ItoProductRuleMartingale) {
  // W(1)^2 - 1 has mean zero; the Leibniz rule would predict mean -1
  const auto s = run_ensemble(1, 1, 20000, 13, 1, [](RngStream& rng, std::span<double> out) {
    double w = 0.0;
    const double dt = 1e-2;
    for (int i = 0; i < 100; ++i) w += wiener_increment(rng, dt).dw;
    out[0] = w * w - 1.0;
  });
  EXPECT_NEAR(s.mean_at(0, 0), 0.0, 3.0 * s.standard_error(0, 0));
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
  auto shot = [](RngStream& rng, std::size_t) { return rng.uniform(); };
  const auto a = monte_carlo_mean(10000, 3, 1, shot);
  const auto b = monte_carlo_mean(10000, 3, 4, shot);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_NEAR(a.mean, 0.5, 3.0 * a.standard_error);
}

TEST(ParallelFor, RethrowsLowestIndex) {
  std::atomic<int> ran{0};
  try {
    parallel_for(100, 4, [&](std::size_t i) {
      ++ran;
      if (i == 20 || i == 70) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "20");
  }
}

TEST(ThreadCount, ExplicitAndEnvironment) {
  EXPECT_EQ(resolve_thread_count(3), 3u);
  setenv("QFC_THREADS", "2", 1);
  EXPECT_EQ(resolve_thread_count(), 2u);
  unsetenv("QFC_THREADS");
  EXPECT_GE(resolve_thread_count(), 1u);
}

TEST(SdeConfig, HorizonRoundsToSteps) {
  const auto c = SdeStepperConfig::for_horizon(2.0, 1e-4);
  EXPECT_EQ(c.step_count, 20000u);
  EXPECT_NEAR(c.horizon(), 2.0, 1e-12);
}

} // namespace
