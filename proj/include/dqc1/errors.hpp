// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dqc1 {

/// Thrown when an argument violates an operation's precondition
/// (shape mismatch, non-unitary dilation, out-of-range parameter).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested register exceeds the dense-simulation cap.
class DimensionCap : public InvalidInput {
 public:
  explicit DimensionCap(const std::string& what) : InvalidInput(what) {}
};

/// Trace estimation with a fully mixed logical qubit: the estimator divides by alpha.
class Unestimable : public std::domain_error {
 public:
  explicit Unestimable(const std::string& what) : std::domain_error(what) {}
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}
}  // namespace detail

}  // namespace dqc1
