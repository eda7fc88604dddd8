// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>

#include "dqc1/linalg.hpp"

// Entropies in nats.
namespace dqc1 {

using linalg::CMatrix;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace detail

/// H2(x) = -(1-x) ln(1-x) - x ln x, with 0 ln 0 = 0.
inline double binary_entropy(double x) {
  detail::require(x >= 0.0 && x <= 1.0, "binary_entropy: x must lie in [0, 1]");
  return -detail::xlogx(1.0 - x) - detail::xlogx(x);
}

/// Von Neumann entropy -tr rho ln rho.
inline double state_entropy(const CMatrix& rho) {
  const auto eig = linalg::hermitian_eig(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    detail::require(lambda >= -1e-10, "state_entropy: eigenvalue " + std::to_string(lambda) + " is negative");
    s -= detail::xlogx(lambda);  // rounding-level negatives contribute 0
  }
  return s;
}

/// D(rho || sigma) = tr rho ln rho - tr rho ln sigma; +infinity when rho has
/// weight outside the support of sigma.
inline double relative_entropy(const CMatrix& rho, const CMatrix& sigma, double support_tol = 1e-12) {
  detail::require(rho.rows() == sigma.rows() && rho.cols() == sigma.cols() && rho.rows() == rho.cols(),
                  "relative_entropy: shape mismatch");
  const auto es = linalg::hermitian_eig(sigma);
  double cross = 0.0;  // tr rho ln sigma
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    const auto vk = es.eigenvectors.col(k);
    const double weight = vk.dot(rho * vk).real();
    const double lambda = es.eigenvalues(k);
    if (lambda <= support_tol) {
      if (weight > support_tol) return kInfinity;
      continue;
    }
    cross += weight * std::log(lambda);
  }
  return -state_entropy(rho) - cross;
}

/// Change in entropy of the logical qubit, H2((1 - alpha t)/2) - H2((1 - alpha)/2).
inline double delta_entropy_logical(double alpha, double t) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "delta_entropy_logical: alpha must lie in [0, 1]");
  detail::require(std::abs(t) <= 1.0, "delta_entropy_logical: |t| must be <= 1");
  return binary_entropy(0.5 * (1.0 - alpha * t)) - binary_entropy(0.5 * (1.0 - alpha));
}

}  // namespace dqc1
