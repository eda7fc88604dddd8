// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "dqc1/linalg.hpp"

namespace dqc1::testing {

using linalg::CMatrix;
using linalg::cplx;

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  const CMatrix a = random_complex(dim, dim, seed);
  return 0.5 * (a + a.adjoint());
}

/// Full-rank density matrix G G^dagger / tr.
inline CMatrix random_density(Eigen::Index dim, std::uint64_t seed) {
  const CMatrix g = random_complex(dim, dim, seed);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Diagonal product state diag(p, 1-p)^{(x) n}, built by index arithmetic.
inline CMatrix product_diagonal_state(int n, double p) {
  const Eigen::Index d = Eigen::Index{1} << n;
  CMatrix s = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double w = 1.0;
    for (int b = 0; b < n; ++b) w *= ((k >> b) & 1) ? (1.0 - p) : p;
    s(k, k) = w;
  }
  return s;
}

/// Element-wise Kronecker product, written independently of linalg::tensor.
inline CMatrix kron_oracle(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
  return out;
}

/// Trace-estimation circuit as a literal product of gates:
/// (H (x) I) (P (x) I) (|0><0| (x) I + |1><1| (x) U) (H (x) I).
inline CMatrix circuit_oracle(const CMatrix& u, bool y_basis = false) {
  const Eigen::Index d = u.rows();
  CMatrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2), ph = CMatrix::Identity(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  if (y_basis) ph(1, 1) = cplx(0.0, -1.0);
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix hh = kron_oracle(h, id);
  const CMatrix cu = kron_oracle(p0, id) + kron_oracle(p1, u);
  return hh * kron_oracle(ph, id) * cu * hh;
}

/// tr_B of an operator on C^2 (x) C^d, summing <s k| M |s' k> directly.
inline CMatrix trace_out_env_oracle(const CMatrix& m, Eigen::Index d) {
  CMatrix out = CMatrix::Zero(2, 2);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      for (Eigen::Index k = 0; k < d; ++k) out(s, sp) += m(s * d + k, sp * d + k);
  return out;
}

/// tr_C of an operator on C^2 (x) C^d.
inline CMatrix trace_out_logical_oracle(const CMatrix& m, Eigen::Index d) {
  return m.topLeftCorner(d, d) + m.bottomRightCorner(d, d);
}

}  // namespace dqc1::testing
