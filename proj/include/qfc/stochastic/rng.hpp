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

#ifndef QFC_STOCHASTIC_RNG_HPP
#define QFC_STOCHASTIC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace qfc {

/// One reproducible random stream per (seed, stream_id).
///
/// The engine is a 64-bit Mersenne twister keyed through std::seed_seq, and the
/// normal draws go through std::normal_distribution. Both are fully specified
/// algorithms, so a given (seed, stream_id) yields the same sequence everywhere
/// this standard library is used.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x71666321u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct WienerIncrement {
  double dw = 0.0;
  double dt = 0.0;
};

/// dW ~ Normal(0, dt).
inline WienerIncrement wiener_increment(RngStream& rng, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt must be positive");
  return {std::sqrt(dt) * rng.normal(), dt};
}

/// Sum of squared increments over a uniform partition of [0, t_total].
inline double ito_quadratic_variation(RngStream& rng, double t_total, std::size_t n_steps) {
  if (n_steps < 1) throw std::invalid_argument("ito_quadratic_variation: n_steps must be >= 1");
  if (!(t_total > 0.0)) throw std::invalid_argument("ito_quadratic_variation: t_total must be positive");
  const double dt = t_total / static_cast<double>(n_steps);
  double s = 0.0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double dw = wiener_increment(rng, dt).dw;
    s += dw * dw;
  }
  return s;
}

} // namespace qfc

#endif // QFC_STOCHASTIC_RNG_HPP
