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

#ifndef QFC_CORE_LINALG_HPP
#define QFC_CORE_LINALG_HPP

#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qfc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Base class of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix failed one of the density-matrix invariants.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a collapsed trace during time stepping.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// Pauli matrix by index 0..3 = I, X, Y, Z.
inline ComplexMatrix pauli(int index) {
  switch (index) {
    case 0: return identity(2);
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
    default: throw std::invalid_argument("pauli: index must be 0..3");
  }
}

inline ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

/// Kronecker product, first factor most significant.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix tensor_product(std::initializer_list<ComplexMatrix> factors) {
  if (factors.size() == 0) throw std::invalid_argument("tensor_product: no factors");
  auto it = factors.begin();
  ComplexMatrix out = *it;
  for (++it; it != factors.end(); ++it) out = tensor_product(out, *it);
  return out;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

/// Tr(a b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    throw DimensionError("trace_of_product: incompatible shapes");
  }
  return (a.array() * b.transpose().array()).sum();
}

/// Re Tr(op rho).
inline double expectation(const ComplexMatrix& op, const ComplexMatrix& rho) {
  return trace_of_product(op, rho).real();
}

/// Largest |m_ij - conj(m_ji)|.
inline double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct HermitianSpectrum {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns
};

/// Eigen-decomposition of the Hermitian part of h.
inline HermitianSpectrum hermitian_spectrum(const ComplexMatrix& h) {
  require_square(h, "hermitian_spectrum");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) throw Error("hermitian_spectrum: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
  require_square(h, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("hermitian_eigenvalues: eigensolver did not converge");
  return solver.eigenvalues();
}

/// f(h) for Hermitian h, f applied to each eigenvalue.
template <class Fn>
ComplexMatrix spectral_function(const ComplexMatrix& h, Fn&& f) {
  const HermitianSpectrum s = hermitian_spectrum(h);
  ComplexVector fv(s.values.size());
  for (Index i = 0; i < s.values.size(); ++i) fv(i) = f(s.values(i));
  return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

/// exp(-i h t) for Hermitian h.
inline ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t) {
  return spectral_function(h, [t](double e) { return std::exp(Complex(0.0, -e * t)); });
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-12) {
  return u.rows() == u.cols() && max_abs(u * u.adjoint() - identity(u.rows())) <= tol;
}

} // namespace qfc

#endif // QFC_CORE_LINALG_HPP
