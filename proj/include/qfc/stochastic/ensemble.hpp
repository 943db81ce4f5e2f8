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

#ifndef QFC_STOCHASTIC_ENSEMBLE_HPP
#define QFC_STOCHASTIC_ENSEMBLE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qfc/core/linalg.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc {

/// Explicit request, else QFC_THREADS, else 1.
inline std::size_t resolve_thread_count(std::optional<std::size_t> requested = std::nullopt) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("QFC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
///
/// Work is handed out through an atomic counter, so results must be written to
/// per-index slots. If several indices throw, the exception of the lowest
/// index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Integration failure inside one trajectory of an ensemble.
class EnsembleError : public IntegrationError {
 public:
  EnsembleError(std::size_t index, const std::string& what)
      : IntegrationError("trajectory " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t trajectory_index() const { return index_; }

 private:
  std::size_t index_;
};

/// Per-sample, per-observable mean and unbiased variance over trajectories.
struct EnsembleStatistics {
  std::size_t n_traj = 0;
  std::size_t n_samples = 0;
  std::size_t n_observables = 0;
  std::vector<double> mean;      // [sample * n_observables + observable]
  std::vector<double> variance;  // zero when n_traj == 1

  double mean_at(std::size_t sample, std::size_t obs) const { return mean[sample * n_observables + obs]; }
  double variance_at(std::size_t sample, std::size_t obs) const { return variance[sample * n_observables + obs]; }
  double standard_error(std::size_t sample, std::size_t obs) const {
    return std::sqrt(variance_at(sample, obs) / static_cast<double>(n_traj));
  }
};

namespace detail {

/// Running (count, mean, M2) for a vector of values.
struct MomentBlock {
  double count = 0.0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit MomentBlock(std::size_t n = 0) : mean(n, 0.0), m2(n, 0.0) {}

  void add(std::span<const double> x) {
    count += 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  // Chan et al. pairwise merge.
  void merge(const MomentBlock& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = o.mean[i] - mean[i];
      mean[i] += delta * o.count / n;
      m2[i] += o.m2[i] + delta * delta * count * o.count / n;
    }
    count = n;
  }
};

inline constexpr std::size_t kEnsembleBlock = 64;

} // namespace detail

/// Runs n_traj trajectories; trajectory i gets RngStream(base_seed, i) and
/// fills out[sample * n_observables + obs].
///
/// Trajectories are grouped in fixed blocks of 64 accumulated in index order and
/// the blocks are merged in index order, so the statistics are bit-identical
/// for every thread count.
template <class Trajectory>
EnsembleStatistics run_ensemble(std::size_t n_samples, std::size_t n_observables, std::size_t n_traj,
                                std::uint64_t base_seed, std::size_t threads, Trajectory&& trajectory) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  const std::size_t width = n_samples * n_observables;
  const std::size_t n_blocks = (n_traj + detail::kEnsembleBlock - 1) / detail::kEnsembleBlock;
  std::vector<detail::MomentBlock> blocks(n_blocks, detail::MomentBlock(width));
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    std::vector<double> out(width);
    const std::size_t lo = b * detail::kEnsembleBlock;
    const std::size_t hi = std::min(n_traj, lo + detail::kEnsembleBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(base_seed, i);
      std::fill(out.begin(), out.end(), 0.0);
      try {
        trajectory(rng, std::span<double>(out));
      } catch (const EnsembleError&) {
        throw;
      } catch (const std::exception& e) {
        throw EnsembleError(i, e.what());
      }
      blocks[b].add(out);
    }
  });
  detail::MomentBlock total(width);
  for (const auto& b : blocks) total.merge(b);
  EnsembleStatistics s;
  s.n_traj = n_traj;
  s.n_samples = n_samples;
  s.n_observables = n_observables;
  s.mean = total.mean;
  s.variance.assign(width, 0.0);
  if (n_traj > 1) {
    for (std::size_t i = 0; i < width; ++i) s.variance[i] = std::max(0.0, total.m2[i] / (total.count - 1.0));
  }
  return s;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Mean of shot(rng, i) over i in [0, samples).
///
/// Shots are cut into blocks of `block` consecutive indices; block b draws from
/// RngStream(seed, b). Blocks are reduced in index order, so the estimate is
/// identical for any thread count.
template <class Shot>
MonteCarloEstimate monte_carlo_mean(std::size_t samples, std::uint64_t seed, std::size_t threads, Shot&& shot,
                                    std::size_t block = 1024) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_mean: samples must be >= 1");
  const std::size_t n_blocks = (samples + block - 1) / block;
  std::vector<detail::MomentBlock> blocks(n_blocks, detail::MomentBlock(1));
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    RngStream rng(seed, b);
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(samples, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = shot(rng, i);
      blocks[b].add(std::span<const double>(&x, 1));
    }
  });
  detail::MomentBlock total(1);
  for (const auto& b : blocks) total.merge(b);
  MonteCarloEstimate e;
  e.samples = samples;
  e.mean = total.mean[0];
  e.standard_error = samples > 1 ? std::sqrt(std::max(0.0, total.m2[0] / (total.count - 1.0)) / total.count) : 0.0;
  return e;
}

} // namespace qfc

#endif // QFC_STOCHASTIC_ENSEMBLE_HPP
