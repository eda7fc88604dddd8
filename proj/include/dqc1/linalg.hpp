// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <random>
#include <string>

#include "dqc1/errors.hpp"

/// Dense complex matrix kernel. The logical qubit is always the leftmost
/// tensor factor (qubit index 0); basis index of a multi-qubit state is the
/// big-endian bit string q0 q1 ... q_{n}.
namespace dqc1::linalg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

inline CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

inline CMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix m(2, 2);
  m << s, s, s, -s;
  return m;
}

/// |i><j| on a space of dimension dim.
inline CMatrix basis_op(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

inline double frobenius_norm(const CMatrix& m) { return m.norm(); }

inline bool all_finite(const CMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const cplx z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline bool is_power_of_two(Eigen::Index d) { return d > 0 && (d & (d - 1)) == 0; }

/// ||U^dagger U - I||_F
inline double unitarity_residual(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - identity(u.rows())).norm();
}

inline double hermiticity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).norm();
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) { return unitarity_residual(u) <= tol; }

/// Kronecker product, (a (x) b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l].
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index rb = b.rows();
  const Eigen::Index cb = b.cols();
  CMatrix out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

/// Reduce a bipartite operator on (keep (x) drop) or (drop (x) keep).
///
/// Explicit double-index summation; dims stay small enough here (<= 2^12)
/// that reshaping tricks buy nothing.
inline CMatrix partial_trace(const CMatrix& m, Eigen::Index dim_keep, Eigen::Index dim_drop, bool keep_first) {
  detail::require(dim_keep >= 1 && dim_drop >= 1, "partial_trace: dimensions must be positive");
  detail::require(m.rows() == m.cols() && m.rows() == dim_keep * dim_drop,
                  "partial_trace: matrix side " + std::to_string(m.rows()) + " != " +
                      std::to_string(dim_keep) + " x " + std::to_string(dim_drop));
  CMatrix out = CMatrix::Zero(dim_keep, dim_keep);
  for (Eigen::Index i = 0; i < dim_keep; ++i) {
    for (Eigen::Index j = 0; j < dim_keep; ++j) {
      cplx acc = 0.0;
      for (Eigen::Index k = 0; k < dim_drop; ++k) {
        acc += keep_first ? m(i * dim_drop + k, j * dim_drop + k) : m(k * dim_keep + i, k * dim_keep + j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

struct HermitianEig {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // columns, orthonormal
};

inline HermitianEig hermitian_eig(const CMatrix& m) {
  detail::require(m.rows() == m.cols() && m.rows() > 0, "hermitian_eig: matrix must be square");
  const double scale = std::max(1.0, m.norm());
  detail::require(hermiticity_residual(m) <= 1e-10 * scale, "hermitian_eig: matrix is not Hermitian");
  // Symmetrize so rounding-level anti-Hermitian parts never reach the solver.
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw InvalidInput("hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Haar-distributed unitary: complex Ginibre matrix, QR, then fix the phases
/// of R's diagonal so Q is Haar rather than QR-convention biased.
inline CMatrix haar_unitary(Eigen::Index dim, std::uint64_t seed) {
  detail::require(dim >= 1, "haar_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re * s, im * s);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * identity(dim);
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const cplx d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0) ? d / mag : cplx(1.0);
  }
  return q;
}

/// Single-qubit operator acting on qubit `pos` of an `nqubits` register.
inline CMatrix embed_qubit_op(const CMatrix& op, int pos, int nqubits) {
  CMatrix out = identity(1);
  for (int q = 0; q < nqubits; ++q) out = tensor(out, q == pos ? op : identity(2));
  return out;
}

}  // namespace dqc1::linalg
