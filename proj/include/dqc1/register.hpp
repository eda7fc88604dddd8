// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <vector>

#include "dqc1/linalg.hpp"

namespace dqc1 {

using linalg::CMatrix;
using linalg::cplx;

/// Dense 2^{n+1} matrices: n = 11 is already 4096 x 4096 complex doubles.
inline constexpr int kMaxAncillas = 11;

/// Measurement basis of the logical qubit. Y is realised by a phase gate in
/// the circuit; the simulator only ever measures sigma_z.
enum class Basis { Z, Y };

inline const char* basis_name(Basis b) { return b == Basis::Z ? "Z" : "Y"; }

struct RegisterSpec {
  int n = 1;
  double alpha = 1.0;
  double omega = 1.0;
  std::vector<double> ancilla_freqs;  // omega_i of H_A = sum_i omega_i sigma^z_i

  /// Fills ancilla_freqs with 1.0 when left empty, then validates.
  static RegisterSpec make(int n, double alpha, double omega = 1.0, std::vector<double> freqs = {}) {
    RegisterSpec s{n, alpha, omega, std::move(freqs)};
    if (s.ancilla_freqs.empty() && n >= 1) s.ancilla_freqs.assign(static_cast<std::size_t>(n), 1.0);
    s.validate();
    return s;
  }

  void validate() const {
    detail::require(n >= 1, "register: n must be >= 1");
    if (n > kMaxAncillas) throw DimensionCap("register: n = " + std::to_string(n) + " exceeds cap " +
                                             std::to_string(kMaxAncillas));
    detail::require(alpha >= 0.0 && alpha <= 1.0, "register: alpha must lie in [0, 1]");
    detail::require(omega > 0.0 && std::isfinite(omega), "register: omega must be positive");
    detail::require(ancilla_freqs.size() == static_cast<std::size_t>(n), "register: need one frequency per ancilla");
    for (double w : ancilla_freqs) detail::require(w > 0.0 && std::isfinite(w), "register: ancilla frequencies must be positive");
  }

  [[nodiscard]] Eigen::Index env_dim() const { return Eigen::Index{1} << n; }
};

struct TraceEstimate {
  long long shots = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  Basis basis = Basis::Z;
};

/// (I + alpha sigma^z) / 2
inline CMatrix logical_state(double alpha) {
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.5 * (1.0 + alpha);
  rho(1, 1) = 0.5 * (1.0 - alpha);
  return rho;
}

inline CMatrix maximally_mixed(Eigen::Index dim) { return linalg::identity(dim) / static_cast<double>(dim); }

/// rho(alpha) = (I + alpha sigma^z)/2 (x) I/2^n
inline CMatrix initial_state(const RegisterSpec& spec) {
  spec.validate();
  return linalg::tensor(logical_state(spec.alpha), maximally_mixed(spec.env_dim()));
}

/// Number of ancillas n for a square matrix of side 2^n.
inline int ancilla_count(const CMatrix& u) {
  detail::require(u.rows() == u.cols() && linalg::is_power_of_two(u.rows()) && u.rows() >= 2,
                  "expected a square matrix of side 2^n with n >= 1");
  int n = 0;
  while ((Eigen::Index{1} << n) < u.rows()) ++n;
  return n;
}

/// Controlled-U sandwiched between Hadamards on the logical qubit. For the Y
/// basis the phase gate diag(1, -i) precedes the last Hadamard, turning the
/// sigma_z readout into a readout of Im tr U.
///
/// Built blockwise, V_{ss'} = (I + phi (-1)^{s+s'} U)/2 with phi = 1 or -i,
/// which avoids dense products at large n.
inline CMatrix trace_estimation_unitary(const CMatrix& u, Basis basis = Basis::Z) {
  const int n = ancilla_count(u);
  if (n > kMaxAncillas) throw DimensionCap("trace_estimation_unitary: n exceeds cap");
  detail::require(linalg::is_unitary(u), "trace_estimation_unitary: U is not unitary");
  const Eigen::Index d = u.rows();
  const cplx phi = basis == Basis::Z ? cplx(1.0, 0.0) : -linalg::kI;
  const CMatrix half_u = 0.5 * phi * u;
  const CMatrix half_i = 0.5 * linalg::identity(d);
  CMatrix v(2 * d, 2 * d);
  v.topLeftCorner(d, d) = half_i + half_u;
  v.topRightCorner(d, d) = half_i - half_u;
  v.bottomLeftCorner(d, d) = half_i - half_u;
  v.bottomRightCorner(d, d) = half_i + half_u;
  return v;
}

/// Normalised trace tr U / 2^n.
inline cplx normalized_trace(const CMatrix& u) { return u.trace() / static_cast<double>(u.rows()); }

/// mu = tr{V sigma^z_1 V^dagger sigma^z_1} / 2^{n+1}
inline double mu_of(const CMatrix& v, int n) {
  detail::require(n >= 1 && n <= kMaxAncillas, "mu_of: n out of range");
  const Eigen::Index side = Eigen::Index{2} << n;
  detail::require(v.rows() == side && v.cols() == side, "mu_of: V must have side 2^{n+1}");
  // sigma^z_1 (x) I is diagonal with +1 on the first half, -1 on the second.
  const Eigen::Index d = side / 2;
  CMatrix zv = v;
  zv.bottomRows(d) *= -1.0;   // Z V
  CMatrix vz = v;
  vz.rightCols(d) *= -1.0;    // V Z
  // tr{V Z V^dagger Z} = sum_ij (V Z)_ij conj((Z V)_ij)
  const cplx tr = (vz.array() * zv.conjugate().array()).sum();
  return tr.real() / static_cast<double>(side);
}

/// P[0] = (1 + alpha mu)/2; the clean case alpha = 1 gives (1 + mu)/2.
inline double p_zero(double mu, double alpha) {
  detail::require(std::abs(mu) <= 1.0 + 1e-12, "p_zero: |mu| must be <= 1");
  detail::require(alpha >= 0.0 && alpha <= 1.0, "p_zero: alpha must lie in [0, 1]");
  return std::clamp(0.5 * (1.0 + alpha * mu), 0.0, 1.0);
}

inline constexpr double kMinEstimableAlpha = 1e-9;

namespace detail {
inline long long count_zeros(double p, long long shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  long long zeros = 0;
  for (long long k = 0; k < shots; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < p) ++zeros;
  }
  return zeros;
}
}  // namespace detail

/// Finite-shot estimate of Re tr U (basis Z) or Im tr U (basis Y).
///
/// Shots are split across `shards` independent streams seeded seed + k, so the
/// result depends only on (seed, shots, shards) and not on thread scheduling.
inline TraceEstimate sample_trace(const RegisterSpec& spec, const CMatrix& u, Basis basis, long long shots,
                                  std::uint64_t seed, int shards = 1) {
  spec.validate();
  detail::require(shots >= 1, "sample_trace: shots must be >= 1");
  detail::require(shards >= 1, "sample_trace: shards must be >= 1");
  if (spec.alpha < kMinEstimableAlpha)
    throw Unestimable("unestimable at infinite temperature: alpha = 0 carries no trace information");
  detail::require(ancilla_count(u) == spec.n, "sample_trace: U dimension does not match register n");

  const CMatrix v = trace_estimation_unitary(u, basis);
  const double p = p_zero(std::clamp(mu_of(v, spec.n), -1.0, 1.0), spec.alpha);

  long long zeros = 0;
  if (shards == 1) {
    zeros = detail::count_zeros(p, shots, seed);
  } else {
    std::vector<std::future<long long>> parts;
    const long long per = shots / shards;
    const long long extra = shots % shards;
    for (int k = 0; k < shards; ++k) {
      const long long m = per + (k < extra ? 1 : 0);
      parts.push_back(std::async(std::launch::async, detail::count_zeros, p, m, seed + static_cast<std::uint64_t>(k)));
    }
    for (auto& f : parts) zeros += f.get();
  }

  const double scale = static_cast<double>(spec.env_dim()) / spec.alpha;
  const double nshots = static_cast<double>(shots);
  const double estimate = (2.0 * static_cast<double>(zeros) / nshots - 1.0) * scale;
  double var = 0.0;
  if (shots > 1) var = std::max(0.0, nshots * (scale * scale - estimate * estimate) / (nshots - 1.0));
  return {shots, estimate, std::sqrt(var / nshots), basis};
}

}  // namespace dqc1
