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

#ifndef QFC_CORE_STATE_HPP
#define QFC_CORE_STATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "qfc/core/linalg.hpp"

namespace qfc {

struct Tolerances {
  double hermiticity = 1e-9;
  double psd = 1e-9;
  double trace = 1e-9;
};

/// Validated density matrix. Immutable after construction.
///
/// Raw mode skips the Hermiticity check (positivity is then tested on the
/// Hermitian part). Only meant for printed fixtures that are not Hermitian.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, Tolerances tol = {}) : m_(std::move(m)), tol_(tol) {
    validate();
  }

  static DensityMatrix raw(ComplexMatrix m, Tolerances tol = {}) {
    DensityMatrix out(std::move(m), tol, true);
    out.validate();
    return out;
  }

  static DensityMatrix maximally_mixed(Index d) {
    return DensityMatrix(identity(d) / static_cast<double>(d));
  }

  /// |i><i| in dimension d.
  static DensityMatrix basis(Index d, Index i) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(i, i) = 1.0;
    return DensityMatrix(std::move(m));
  }

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  bool is_raw() const { return raw_; }
  const Tolerances& tolerances() const { return tol_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

 private:
  DensityMatrix(ComplexMatrix m, Tolerances tol, bool raw) : m_(std::move(m)), tol_(tol), raw_(raw) {}

  void validate() const {
    require_square(m_, "DensityMatrix");
    if (!m_.allFinite()) throw StateError("DensityMatrix: non-finite entries");
    if (!raw_) {
      const double herm = hermiticity_error(m_);
      if (herm > tol_.hermiticity) {
        std::ostringstream os;
        os << "DensityMatrix: not Hermitian (max deviation " << herm << ")";
        throw StateError(os.str());
      }
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol_.trace) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << tr.real() << (tr.imag() < 0 ? "-" : "+") << std::abs(tr.imag())
         << "i differs from 1";
      throw StateError(os.str());
    }
    const double lmin = hermitian_eigenvalues(m_).minCoeff();
    if (lmin < -tol_.psd) {
      std::ostringstream os;
      os << "DensityMatrix: negative eigenvalue " << lmin;
      throw StateError(os.str());
    }
  }

  ComplexMatrix m_;
  Tolerances tol_;
  bool raw_ = false;
};

/// Unit vector in C^d.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes) : psi_(std::move(amplitudes)) {
    if (psi_.size() == 0) throw DimensionError("PureState: empty vector");
    if (std::abs(psi_.squaredNorm() - 1.0) > 1e-12) throw StateError("PureState: norm differs from 1");
  }

  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw StateError("PureState: zero vector");
    return PureState(v / n);
  }

  static PureState basis(Index d, Index i) {
    ComplexVector v = ComplexVector::Zero(d);
    v(i) = 1.0;
    return PureState(std::move(v));
  }

  const ComplexVector& amplitudes() const { return psi_; }
  Index dim() const { return psi_.size(); }
  ComplexMatrix projector() const { return psi_ * psi_.adjoint(); }
  DensityMatrix density() const { return DensityMatrix(projector()); }

 private:
  ComplexVector psi_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  BlochVector() = default;
  BlochVector(double ax, double ay, double az) : x(ax), y(ay), z(az) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || norm_squared() > 1.0 + 1e-9) {
      throw StateError("BlochVector: outside the unit ball");
    }
  }

  double norm_squared() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_squared()); }
  std::array<double, 3> as_array() const { return {x, y, z}; }
};

inline BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionError("bloch_from_density: qubit state required");
  const ComplexMatrix& m = rho.matrix();
  return BlochVector(2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real());
}

inline ComplexMatrix density_matrix_from_bloch(double x, double y, double z) {
  ComplexMatrix m(2, 2);
  m << 0.5 * (1.0 + z), 0.5 * Complex(x, -y), 0.5 * Complex(x, y), 0.5 * (1.0 - z);
  return m;
}

inline DensityMatrix density_from_bloch(const BlochVector& v) {
  return DensityMatrix(density_matrix_from_bloch(v.x, v.y, v.z));
}

/// Two-qubit Pauli expansion: rho = (1/4) sum r_ij sigma_i (x) sigma_j, indices 0..3 = I,X,Y,Z.
struct FanoCoefficients {
  std::array<std::array<double, 4>, 4> r{};
  double operator()(int i, int j) const { return r[i][j]; }
};

/// r_ij = Tr((sigma_i (x) sigma_j) rho) on a 4x4 matrix (no validation).
inline FanoCoefficients fano_decompose_matrix(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("fano_decompose: two-qubit state required");
  FanoCoefficients f;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      f.r[i][j] = expectation(tensor_product(pauli(i), pauli(j)), rho);
    }
  }
  return f;
}

inline FanoCoefficients fano_decompose(const DensityMatrix& rho) { return fano_decompose_matrix(rho.matrix()); }

inline ComplexMatrix fano_compose(const FanoCoefficients& f) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m += f.r[i][j] * tensor_product(pauli(i), pauli(j));
  }
  return m / 4.0;
}

/// Sum of squares of the 3x3 correlation block.
inline double fano_r_squared(const FanoCoefficients& f) {
  double s = 0.0;
  for (int i = 1; i < 4; ++i) {
    for (int j = 1; j < 4; ++j) s += f.r[i][j] * f.r[i][j];
  }
  return s;
}

/// Re Tr(a b), clamped to [0, 1 + 1e-9].
inline double fidelity_trace(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity_trace: dimension mismatch");
  const double f = trace_of_product(a.matrix(), b.matrix()).real();
  return std::clamp(f, 0.0, 1.0 + 1e-9);
}

inline double purity(const ComplexMatrix& rho) { return trace_of_product(rho, rho).real(); }
inline double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

/// -sum lambda ln lambda over eigenvalues above 1e-12.
inline double von_neumann_entropy(const ComplexMatrix& rho) {
  const RealVector ev = hermitian_eigenvalues(rho);
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 1e-12) s -= ev(i) * std::log(ev(i));
  }
  return s;
}
inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

/// Partial trace keeping one factor of a tensor product space; no validation.
inline ComplexMatrix partial_trace_matrix(const ComplexMatrix& rho, const std::vector<Index>& dims,
                                          std::size_t keep) {
  require_square(rho, "partial_trace");
  if (dims.empty() || keep >= dims.size()) throw DimensionError("partial_trace: keep index out of range");
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw DimensionError("partial_trace: subsystem dimensions must be positive");
    total *= d;
  }
  if (total != rho.rows()) throw DimensionError("partial_trace: product of subsystem dims differs from state dim");
  Index left = 1;
  for (std::size_t i = 0; i < keep; ++i) left *= dims[i];
  const Index dk = dims[keep];
  const Index right = total / (left * dk);
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i) {
    for (Index j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (Index l = 0; l < left; ++l) {
        for (Index r = 0; r < right; ++r) s += rho((l * dk + i) * right + r, (l * dk + j) * right + r);
      }
      out(i, j) = s;
    }
  }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<Index>& dims, std::size_t keep) {
  ComplexMatrix m = partial_trace_matrix(rho.matrix(), dims, keep);
  if (rho.is_raw()) return DensityMatrix::raw(std::move(m), rho.tolerances());
  return DensityMatrix(std::move(m), rho.tolerances());
}

} // namespace qfc

#endif // QFC_CORE_STATE_HPP
