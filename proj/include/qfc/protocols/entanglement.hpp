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

#ifndef QFC_PROTOCOLS_ENTANGLEMENT_HPP
#define QFC_PROTOCOLS_ENTANGLEMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfc/core/linalg.hpp"
#include "qfc/core/state.hpp"
#include "qfc/sme/integrator.hpp"
#include "qfc/sme/model.hpp"
#include "qfc/stochastic/ensemble.hpp"
#include "qfc/stochastic/rng.hpp"

namespace qfc::entanglement {

inline void require_two_qubit(const ComplexMatrix& rho, const char* what) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError(std::string(what) + ": two-qubit state required");
}

inline ComplexMatrix zz() { return tensor_product(pauli_z(), pauli_z()); }

/// Single channel sqrt(2k) Z(x)Z, efficiency 1.
inline SmeModel zz_model(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("zz_model: k must be positive");
  SmeModel m;
  m.hamiltonian_base = ComplexMatrix::Zero(4, 4);
  m.channels.push_back({zz(), 2.0 * k, 1.0, "ZZ"});
  return m;
}

/// dr = -k[ZZ,[ZZ,r]]dt + sqrt(2k) H[ZZ]r dW. The default scheme keeps pure
/// inputs positive; plain Euler-Maruyama does not.
inline DensityMatrix two_qubit_sme_step(const DensityMatrix& rho, double k, double dt, double dw,
                                        StepScheme scheme = StepScheme::PositiveKraus) {
  require_two_qubit(rho.matrix(), "two_qubit_sme_step");
  const std::array<double, 1> w{dw};
  return sme_step(zz_model(k), rho, 0.0, dt, w, scheme);
}

/// Projectors on D+ = span{|00>,|11>} and D- = span{|01>,|10>}.
inline ComplexMatrix dfs_plus_projector() {
  ComplexMatrix p = ComplexMatrix::Zero(4, 4);
  p(0, 0) = p(3, 3) = 1.0;
  return p;
}

inline ComplexMatrix dfs_minus_projector() { return identity(4) - dfs_plus_projector(); }

struct DfsDecomposition {
  ComplexMatrix plus_block;
  ComplexMatrix minus_block;
  double weight_plus = 0.0;
  double weight_minus = 0.0;
  double leakage = 0.0;          // 2 ||P+ rho P-||_F^2: coherence between the blocks
  double outside_weight = 0.0;   // population outside the dominant block
  bool in_plus = false;
  bool in_minus = false;
};

inline DfsDecomposition dfs_membership(const DensityMatrix& rho) {
  require_two_qubit(rho.matrix(), "dfs_membership");
  DfsDecomposition d;
  d.plus_block = dfs_plus_projector();
  d.minus_block = dfs_minus_projector();
  const ComplexMatrix& m = rho.matrix();
  d.weight_plus = (m(0, 0) + m(3, 3)).real();
  d.weight_minus = (m(1, 1) + m(2, 2)).real();
  const ComplexMatrix off = d.plus_block * m * d.minus_block;
  d.leakage = 2.0 * off.squaredNorm();
  d.outside_weight = std::min(d.weight_plus, d.weight_minus);
  d.in_plus = d.weight_minus <= 1e-9;
  d.in_minus = d.weight_plus <= 1e-9;
  return d;
}

inline ComplexMatrix hadamard_toggle(const ComplexMatrix& rho) {
  require_two_qubit(rho, "hadamard_toggle");
  static const ComplexMatrix hh = tensor_product(hadamard(), hadamard());
  return hh * rho * hh;
}

inline DensityMatrix hadamard_toggle(const DensityMatrix& rho) {
  return DensityMatrix(hadamard_toggle(rho.matrix()), rho.tolerances());
}

/// Encoded Pauli triples. q1 = (I X, Z Y, Z Z), q2 = (X X, Y X, Z I).
///
/// Each triple obeys the Pauli algebra and the two triples commute, so they
/// define a tensor-product split of the two-qubit space (the frame obtained
/// by a CNOT from qubit 1 to qubit 2). q1.z is the block population
/// difference, and inside D- the q2 operators act as the intra-block Paulis.
inline const std::array<ComplexMatrix, 3>& encoded_paulis(int which) {
  static const std::array<ComplexMatrix, 3> q1{tensor_product(identity(2), pauli_x()),
                                               tensor_product(pauli_z(), pauli_y()), zz()};
  static const std::array<ComplexMatrix, 3> q2{tensor_product(pauli_x(), pauli_x()),
                                               tensor_product(pauli_y(), pauli_x()),
                                               tensor_product(pauli_z(), identity(2))};
  if (which != 1 && which != 2) throw std::invalid_argument("encoded_paulis: which must be 1 or 2");
  return which == 1 ? q1 : q2;
}

struct EncodedQubits {
  BlochVector q1;
  BlochVector q2;
};

inline std::array<double, 3> encoded_vector(const ComplexMatrix& rho, int which) {
  const auto& p = encoded_paulis(which);
  return {expectation(p[0], rho), expectation(p[1], rho), expectation(p[2], rho)};
}

inline EncodedQubits encoded_coords(const DensityMatrix& rho) {
  require_two_qubit(rho.matrix(), "encoded_coords");
  const auto a = encoded_vector(rho.matrix(), 1);
  const auto b = encoded_vector(rho.matrix(), 2);
  return {BlochVector(a[0], a[1], a[2]), BlochVector(b[0], b[1], b[2])};
}

/// cos(beta/2) I - i sin(beta/2) n.P for an encoded qubit; rotates that
/// qubit's Bloch vector by beta about n (right-handed).
inline ComplexMatrix encoded_rotation(int which, const std::array<double, 3>& n, double beta) {
  const auto& p = encoded_paulis(which);
  const ComplexMatrix g = n[0] * p[0] + n[1] * p[1] + n[2] * p[2];
  return std::cos(0.5 * beta) * identity(4) - kI * std::sin(0.5 * beta) * g;
}

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline void conjugate(ComplexMatrix& rho, const ComplexMatrix& u) { rho = u * rho * u.adjoint(); }

/// Rotates encoded qubit `which` in the plane of `axis` and its vector so that
/// the component along `axis` vanishes.
inline void rotate_to_equator(ComplexMatrix& rho, int which, const Vec3& axis) {
  const Vec3 v = encoded_vector(rho, which);
  const double par = dot(v, axis);
  const Vec3 c = cross(axis, v);
  const double perp = norm(c);
  if (norm(v) < 1e-14 || std::abs(par) < 1e-15) return;
  Vec3 n;
  if (perp < 1e-14) {
    // v along the axis: any perpendicular direction will do
    const Vec3 e = std::abs(axis[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    n = cross(axis, e);
  } else {
    n = c;
  }
  const double nn = norm(n);
  for (double& x : n) x /= nn;
  // rotating about axis x v by +beta moves v away from the axis
  conjugate(rho, encoded_rotation(which, n, std::atan2(par, perp)));
}

/// Rotates encoded qubit `which` onto the direction `target`.
inline void rotate_to_pole(ComplexMatrix& rho, int which, const Vec3& target) {
  const Vec3 v = encoded_vector(rho, which);
  const double len = norm(v);
  if (len < 1e-14) return;
  const Vec3 c = cross(v, target);
  const double s = norm(c);
  const double angle = std::atan2(s, dot(v, target));
  if (angle < 1e-15) return;
  Vec3 n;
  if (s < 1e-14) {
    const Vec3 e = std::abs(target[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    n = cross(target, e);
  } else {
    n = c;
  }
  const double nn = norm(n);
  for (double& x : n) x /= nn;
  conjugate(rho, encoded_rotation(which, n, angle));
}

} // namespace detail

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline const char* bell_name(BellState b) {
  switch (b) {
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
  }
  return "?";
}

inline ComplexVector bell_vector(BellState b) {
  ComplexVector v = ComplexVector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  switch (b) {
    case BellState::PhiPlus: v(0) = s; v(3) = s; break;
    case BellState::PhiMinus: v(0) = s; v(3) = -s; break;
    case BellState::PsiPlus: v(1) = s; v(2) = s; break;
    case BellState::PsiMinus: v(1) = s; v(2) = -s; break;
  }
  return v;
}

inline DensityMatrix bell_density(BellState b) {
  const ComplexVector v = bell_vector(b);
  return DensityMatrix(v * v.adjoint());
}

inline double r_squared(const ComplexMatrix& rho) { return fano_r_squared(fano_decompose_matrix(rho)); }

struct EntangleOptions {
  double k = 1.0;
  double dt = 1e-3;
  double horizon_kt = 10.0;
  double leakage_threshold = 1e-3;  // stage 1 ends once the population outside the target block is this small
  double purity_threshold = 0.995;  // stage 2 ends once (1 + |q2|^2)/2 reaches this
  std::size_t record_every = 10;
  bool throw_on_exhaustion = true;

  void validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("EntangleOptions: k must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("EntangleOptions: dt must be positive");
    if (!(horizon_kt > 0.0)) throw std::invalid_argument("EntangleOptions: horizon must be positive");
    if (!(leakage_threshold > 0.0 && leakage_threshold < 0.5)) {
      throw std::invalid_argument("EntangleOptions: leakage threshold must lie in (0, 1/2)");
    }
    if (!(purity_threshold > 0.5 && purity_threshold < 1.0)) {
      throw std::invalid_argument("EntangleOptions: purity threshold must lie in (1/2, 1)");
    }
    if (record_every == 0) throw std::invalid_argument("EntangleOptions: record_every must be >= 1");
  }
};

struct EntangleSample {
  double t = 0.0;
  int stage = 1;
  double r_squared = 0.0;
  double leakage = 0.0;  // population outside the target block
  double q1_z = 0.0;
  double q2_purity = 0.0;
  double fidelity = 0.0;  // to the target Bell state
};

struct EntangleResult {
  std::vector<EntangleSample> path;
  ComplexMatrix final_state;
  BellState target = BellState::PhiPlus;
  bool converged = false;
  double t_stage1 = -1.0;  // time stage 1 finished
  double t_final = 0.0;
  double final_r_squared = 0.0;
  double final_fidelity = 0.0;
};

/// Thrown when the budget runs out before both stages finish; carries the partial run.
class HorizonExhausted : public Error {
 public:
  explicit HorizonExhausted(EntangleResult partial)
      : Error("entangle_protocol: horizon exhausted before the thresholds were met"), partial_(std::move(partial)) {}
  const EntangleResult& partial() const { return partial_; }

 private:
  EntangleResult partial_;
};

/// Two-stage measurement-feedback protocol from any two-qubit state toward a Bell state.
///
/// Stage 1 monitors Z(x)Z and keeps encoded q1 on its equator; once q1 is pure
/// enough it is rotated onto the pole chosen at the start (D+ if <ZZ> >= 0).
/// Stage 2 monitors X(x)X (Hadamard toggle around the Z(x)Z step) and keeps q2
/// on the equator relative to x; once pure enough q2 is rotated onto +-x.
/// Steps use the positive Kraus scheme.
inline EntangleResult entangle_protocol(const DensityMatrix& rho0, const EntangleOptions& opt, RngStream& rng) {
  opt.validate();
  require_two_qubit(rho0.matrix(), "entangle_protocol");
  const SmeModel model = zz_model(opt.k);
  qfc::detail::StepKernel kernel(model);
  kernel.require_step_size(opt.dt);

  ComplexMatrix rho = rho0.matrix();
  const bool plus = expectation(zz(), rho) >= 0.0;
  const detail::Vec3 zhat{0, 0, 1}, xhat{1, 0, 0};
  const detail::Vec3 pole1{0, 0, plus ? 1.0 : -1.0};
  const double q1_len_needed = 1.0 - 2.0 * opt.leakage_threshold;
  const std::size_t max_steps = static_cast<std::size_t>(std::ceil(opt.horizon_kt / (opt.k * opt.dt) - 1e-9));
  const double sdt = std::sqrt(opt.dt);

  EntangleResult res;
  res.target = plus ? BellState::PhiPlus : BellState::PsiPlus;
  int stage = 1;
  auto target_bell = [&]() -> BellState {
    if (stage < 3) return res.target;
    const bool xplus = expectation(encoded_paulis(2)[0], rho) >= 0.0;
    if (plus) return xplus ? BellState::PhiPlus : BellState::PhiMinus;
    return xplus ? BellState::PsiPlus : BellState::PsiMinus;
  };
  auto record = [&](double t) {
    EntangleSample s;
    s.t = t;
    s.stage = stage;
    s.r_squared = r_squared(rho);
    const double wp = (rho(0, 0) + rho(3, 3)).real();
    s.leakage = plus ? 1.0 - wp : wp;
    s.q1_z = expectation(zz(), rho);
    const auto q2 = encoded_vector(rho, 2);
    s.q2_purity = 0.5 * (1.0 + detail::dot(q2, q2));
    const ComplexVector b = bell_vector(target_bell());
    s.fidelity = (b.adjoint() * rho * b)(0, 0).real();
    res.path.push_back(s);
  };
  // advances the stage machine at time t without stepping
  auto check = [&]() {
    if (stage == 1) {
      const auto q1 = encoded_vector(rho, 1);
      if (detail::norm(q1) >= q1_len_needed) {
        detail::rotate_to_pole(rho, 1, pole1);
        stage = 2;
      }
    }
    if (stage == 2) {
      const auto q2 = encoded_vector(rho, 2);
      if (0.5 * (1.0 + detail::dot(q2, q2)) >= opt.purity_threshold) {
        detail::rotate_to_pole(rho, 2, detail::Vec3{q2[0] >= 0.0 ? 1.0 : -1.0, 0, 0});
        stage = 3;
      }
    }
  };

  check();
  if (stage >= 2) res.t_stage1 = 0.0;
  std::size_t n = 0;
  double t = 0.0;
  record(t);
  while (stage < 3 && n < max_steps) {
    const std::array<double, 1> dw{sdt * rng.normal()};
    if (stage == 1) {
      kernel.step(StepScheme::PositiveKraus, rho, t, opt.dt, dw, true);
      detail::rotate_to_equator(rho, 1, zhat);
    } else {
      rho = hadamard_toggle(rho);
      kernel.step(StepScheme::PositiveKraus, rho, t, opt.dt, dw, true);
      rho = hadamard_toggle(rho);
      detail::rotate_to_equator(rho, 2, xhat);
    }
    rho = hermitian_part(rho);
    ++n;
    t = static_cast<double>(n) * opt.dt;
    const int before = stage;
    check();
    if (before == 1 && stage >= 2) res.t_stage1 = t;
    if (n % opt.record_every == 0 || stage == 3 || n == max_steps) record(t);
  }
  res.converged = stage == 3;
  res.target = target_bell();
  res.final_state = rho;
  res.t_final = t;
  res.final_r_squared = r_squared(rho);
  const ComplexVector b = bell_vector(res.target);
  res.final_fidelity = (b.adjoint() * rho * b)(0, 0).real();
  if (!res.converged && opt.throw_on_exhaustion) throw HorizonExhausted(std::move(res));
  return res;
}

inline EntangleResult entangle_protocol(const DensityMatrix& rho0, const EntangleOptions& opt, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return entangle_protocol(rho0, opt, rng);
}

/// Final R^2 for n_seeds runs; run i uses RngStream(seed, i). Exhausted runs
/// report the R^2 they reached.
inline std::vector<double> entangle_final_r_squared(const DensityMatrix& rho0, EntangleOptions opt, std::size_t n_seeds,
                                                    std::uint64_t seed, std::size_t threads = 1) {
  opt.throw_on_exhaustion = false;
  opt.record_every = std::numeric_limits<std::size_t>::max();
  std::vector<double> out(n_seeds, 0.0);
  parallel_for(n_seeds, threads, [&](std::size_t i) {
    RngStream rng(seed, i);
    out[i] = entangle_protocol(rho0, opt, rng).final_r_squared;
  });
  return out;
}

} // namespace qfc::entanglement

#endif // QFC_PROTOCOLS_ENTANGLEMENT_HPP
