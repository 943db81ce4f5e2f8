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

#ifndef QFC_CHAOS_JULIA_HPP
#define QFC_CHAOS_JULIA_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qfc/chaos/riemann.hpp"
#include "qfc/stochastic/ensemble.hpp"

namespace qfc::chaos {

struct RasterJob {
  double re_min = -2.0, re_max = 2.0;
  double im_min = -2.0, im_max = 2.0;
  int width = 512, height = 512;
  int max_iters = 40;
  double cycle_tol = 1e-9;
  int max_period = 8;
  Complex p = 1.0;

  void validate() const {
    if (!(re_max > re_min) || !(im_max > im_min)) throw std::invalid_argument("RasterJob: empty viewport");
    if (width < 1 || height < 1) throw std::invalid_argument("RasterJob: width and height must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("RasterJob: max_iters must be >= 1");
    if (!(cycle_tol > 0.0)) throw std::invalid_argument("RasterJob: cycle_tol must be positive");
    if (max_period < 1) throw std::invalid_argument("RasterJob: max_period must be >= 1");
  }

  /// Pixel centre; row 0 is the top (im_max) row.
  Complex pixel(int row, int col) const {
    const double re = re_min + (col + 0.5) * (re_max - re_min) / width;
    const double im = im_max - (row + 0.5) * (im_max - im_min) / height;
    return {re, im};
  }
};

/// Row-major first-arrival steps; -1 marks non-convergent pixels.
struct RasterGrid {
  int width = 0, height = 0;
  int max_iters = 0;
  std::vector<int> counts;

  int at(int row, int col) const { return counts[static_cast<std::size_t>(row) * width + col]; }
};

/// First step at which the orbit of z0 enters the cycle_tol neighbourhood of an
/// attracting cycle found on the tail, or -1.
///
/// The cycle is searched after a burn-in of max_iters/2: the smallest period q
/// in 1..max_period with chordal(z_N, z_{N-q}) <= tol whose multiplier (product
/// of spherical derivatives over the cycle) is below 1.
inline int convergence_step(const RiemannPoint& z0, Complex p, int max_iters, double tol, int max_period = 8) {
  std::vector<RiemannPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(max_iters) + 1);
  orbit.push_back(z0);
  for (int n = 0; n < max_iters; ++n) orbit.push_back(fp_map(orbit.back(), p));
  const int last = max_iters;
  const int burn = max_iters / 2;
  int period = 0;
  for (int q = 1; q <= max_period && last - q >= burn; ++q) {
    if (chordal_distance(orbit[last], orbit[last - q]) > tol) continue;
    double mult = 1.0;
    for (int i = 0; i < q; ++i) mult *= fp_spherical_derivative(orbit[last - i], p);
    if (mult < 1.0) {
      period = q;
      break;
    }
  }
  if (period == 0) return -1;
  for (int n = 0; n <= last; ++n) {
    for (int i = 0; i < period; ++i) {
      if (chordal_distance(orbit[n], orbit[last - i]) <= tol) return n;
    }
  }
  return -1;
}

inline RasterGrid julia_raster(const RasterJob& job, std::size_t threads = 1) {
  job.validate();
  RasterGrid g;
  g.width = job.width;
  g.height = job.height;
  g.max_iters = job.max_iters;
  g.counts.assign(static_cast<std::size_t>(job.width) * job.height, -1);
  parallel_for(static_cast<std::size_t>(job.height), threads, [&](std::size_t r) {
    const int row = static_cast<int>(r);
    for (int col = 0; col < job.width; ++col) {
      g.counts[r * job.width + col] =
          convergence_step(RiemannPoint(job.pixel(row, col)), job.p, job.max_iters, job.cycle_tol, job.max_period);
    }
  });
  return g;
}

/// Pixels whose count differs from a 4-neighbour.
inline std::vector<std::uint8_t> raster_boundary(const RasterGrid& g) {
  std::vector<std::uint8_t> b(g.counts.size(), 0);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      const int v = g.at(r, c);
      const bool edge = (r > 0 && g.at(r - 1, c) != v) || (r + 1 < g.height && g.at(r + 1, c) != v) ||
                        (c > 0 && g.at(r, c - 1) != v) || (c + 1 < g.width && g.at(r, c + 1) != v);
      b[static_cast<std::size_t>(r) * g.width + c] = edge ? 1 : 0;
    }
  }
  return b;
}

struct BoxCount {
  std::vector<int> sizes;
  std::vector<double> counts;
  double dimension = 0.0;  // least-squares slope of log N(s) against log(1/s)
};

/// Grid box counting of the convergence-time boundary.
inline BoxCount box_counting_dimension(const RasterGrid& g, std::vector<int> sizes = {2, 4, 8, 16, 32}) {
  const auto b = raster_boundary(g);
  BoxCount out;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("box_counting_dimension: box size must be >= 1");
    int n = 0;
    for (int r0 = 0; r0 < g.height; r0 += s) {
      for (int c0 = 0; c0 < g.width; c0 += s) {
        bool hit = false;
        for (int r = r0; r < std::min(r0 + s, g.height) && !hit; ++r) {
          for (int c = c0; c < std::min(c0 + s, g.width); ++c) {
            if (b[static_cast<std::size_t>(r) * g.width + c]) {
              hit = true;
              break;
            }
          }
        }
        n += hit;
      }
    }
    if (n == 0) continue;
    out.sizes.push_back(s);
    out.counts.push_back(n);
  }
  const std::size_t m = out.sizes.size();
  if (m < 2) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = -std::log(static_cast<double>(out.sizes[i]));
    const double y = std::log(out.counts[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.dimension = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

} // namespace qfc::chaos

#endif // QFC_CHAOS_JULIA_HPP
