// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "dqc1/linalg.hpp"
#include "dqc1/register.hpp"

/// The logical qubit of a DQC1 register viewed as an open system: the
/// ancillas are the environment and the register unitary is the dilation.
namespace dqc1 {

enum class Direction { forward, reverse };

inline const char* direction_name(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }

/// Operator-sum representation E(rho) = sum_k K_k rho K_k^dagger.
struct KrausSet {
  std::vector<CMatrix> operators;
  std::vector<std::pair<int, int>> labels;  // (i, j) environment indices

  [[nodiscard]] std::size_t size() const { return operators.size(); }
};

/// ||sum K^dagger K - I||_F
inline double trace_preservation_defect(const KrausSet& ks) {
  detail::require(!ks.operators.empty(), "kraus set is empty");
  const Eigen::Index d = ks.operators.front().cols();
  CMatrix acc = CMatrix::Zero(d, d);
  for (const auto& k : ks.operators) acc += k.adjoint() * k;
  return (acc - linalg::identity(d)).norm();
}

/// ||sum K K^dagger - I||_F. Zero iff the channel fixes the identity.
inline double unitality_defect(const KrausSet& ks) {
  detail::require(!ks.operators.empty(), "kraus set is empty");
  const Eigen::Index d = ks.operators.front().rows();
  CMatrix acc = CMatrix::Zero(d, d);
  for (const auto& k : ks.operators) acc += k * k.adjoint();
  return (acc - linalg::identity(d)).norm();
}

inline CMatrix kraus_apply(const KrausSet& ks, const CMatrix& rho) {
  detail::require(!ks.operators.empty(), "kraus set is empty");
  CMatrix out = CMatrix::Zero(ks.operators.front().rows(), ks.operators.front().rows());
  for (const auto& k : ks.operators) out += k * rho * k.adjoint();
  return out;
}

namespace detail {

inline bool is_diagonal(const CMatrix& m, double tol = 1e-14) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

inline void require_density(const CMatrix& rho, Eigen::Index dim, const char* what) {
  require(rho.rows() == dim && rho.cols() == dim, std::string(what) + ": expected a " + std::to_string(dim) +
                                                      "x" + std::to_string(dim) + " density matrix");
  require(linalg::all_finite(rho), std::string(what) + ": entries must be finite");
  require(linalg::hermiticity_residual(rho) <= 1e-10, std::string(what) + ": density matrix is not Hermitian");
  require(std::abs(rho.trace() - 1.0) <= 1e-10, std::string(what) + ": density matrix must have unit trace");
  const auto eig = linalg::hermitian_eig(rho);
  require(eig.eigenvalues.minCoeff() >= -1e-12, std::string(what) + ": density matrix is not positive semidefinite");
}

/// Environment eigenbasis used to index Kraus operators. A diagonal state
/// keeps the computational basis; the maximally mixed state is degenerate so
/// any basis would do, and this one reproduces the textbook operator table.
inline linalg::HermitianEig environment_basis(const CMatrix& env) {
  if (is_diagonal(env)) {
    return {env.diagonal().real(), linalg::identity(env.rows())};
  }
  return linalg::hermitian_eig(env);
}

}  // namespace detail

/// Stinespring form E(rho) = tr_n{ V (rho (x) sigma_env) V^dagger }.
///
/// The superoperator is contracted once at construction, so apply() costs
/// O(1) and the object never changes afterwards. A reversed channel stores
/// V^dagger as its dilation.
class DQC1Channel {
 public:
  DQC1Channel(CMatrix dilation, int n, Direction direction = Direction::forward,
              std::optional<CMatrix> env_state = std::nullopt)
      : dilation_(std::move(dilation)), n_(n), direction_(direction) {
    detail::require(n >= 1, "channel: n must be >= 1");
    if (n > kMaxAncillas) throw DimensionCap("channel: n exceeds cap " + std::to_string(kMaxAncillas));
    const Eigen::Index d = Eigen::Index{1} << n;
    detail::require(dilation_.rows() == 2 * d && dilation_.cols() == 2 * d,
                    "channel: dilation must have side 2^{n+1}");
    detail::require(linalg::is_unitary(dilation_), "channel: dilation is not unitary");
    env_ = env_state ? std::move(*env_state) : maximally_mixed(d);
    detail::require_density(env_, d, "channel environment");
    superop_ = contract();
    kraus_ = std::make_shared<LazyKraus>();
  }

  /// Trace-estimation channel for target unitary U.
  static DQC1Channel trace_estimation(const CMatrix& u, Basis basis = Basis::Z) {
    return DQC1Channel(trace_estimation_unitary(u, basis), ancilla_count(u));
  }

  [[nodiscard]] const CMatrix& dilation_unitary() const { return dilation_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] Direction direction() const { return direction_; }
  [[nodiscard]] const CMatrix& env_state() const { return env_; }

  /// Liouville matrix: vec(E(rho))[2s + r] = sum superop[(2s+r),(2s'+r')] rho[s', r'].
  [[nodiscard]] const CMatrix& superoperator() const { return superop_; }

  [[nodiscard]] CMatrix apply(const CMatrix& rho) const {
    detail::require(rho.rows() == 2 && rho.cols() == 2, "apply: expected a 2x2 operator");
    CMatrix out(2, 2);
    for (int s = 0; s < 2; ++s)
      for (int r = 0; r < 2; ++r) {
        cplx acc = 0.0;
        for (int sp = 0; sp < 2; ++sp)
          for (int rp = 0; rp < 2; ++rp) acc += superop_(2 * s + r, 2 * sp + rp) * rho(sp, rp);
        out(s, r) = acc;
      }
    return out;
  }

  /// Kraus operators K_ij = sqrt(b_j) <i|V|j> over the environment eigenbasis,
  /// derived on first use and shared between copies.
  [[nodiscard]] const KrausSet& kraus() const;

 private:
  struct LazyKraus {
    std::once_flag once;
    KrausSet set;
  };

  CMatrix contract() const {
    // c[s,s',r,r'] = tr(V_{ss'} sigma V_{rr'}^dagger)
    const Eigen::Index d = env_.rows();
    const bool diag = detail::is_diagonal(env_);
    std::array<CMatrix, 4> scaled;
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) {
        const auto block = dilation_.block(s * d, sp * d, d, d);
        scaled[2 * s + sp] = diag ? CMatrix(block * env_.diagonal().asDiagonal()) : CMatrix(block * env_);
      }
    CMatrix sup(4, 4);
    for (int s = 0; s < 2; ++s)
      for (int r = 0; r < 2; ++r)
        for (int sp = 0; sp < 2; ++sp)
          for (int rp = 0; rp < 2; ++rp) {
            const auto vr = dilation_.block(r * d, rp * d, d, d);
            sup(2 * s + r, 2 * sp + rp) = (scaled[2 * s + sp].array() * vr.conjugate().array()).sum();
          }
    return sup;
  }

  CMatrix dilation_;
  int n_;
  Direction direction_;
  CMatrix env_;
  CMatrix superop_;
  std::shared_ptr<LazyKraus> kraus_;
};

/// Kraus set of tr_B{V (rho (x) env) V^dagger} on a qubit system.
/// Environment components with zero weight contribute no operators.
inline KrausSet kraus_from_dilation(const CMatrix& v, const CMatrix& env_state) {
  const Eigen::Index d = env_state.rows();
  detail::require(d >= 1 && v.rows() == 2 * d && v.cols() == 2 * d, "kraus_from_dilation: shape mismatch");
  detail::require(linalg::is_unitary(v), "kraus_from_dilation: dilation is not unitary");
  detail::require_density(env_state, d, "kraus_from_dilation environment");
  const auto basis = detail::environment_basis(env_state);
  const CMatrix& w = basis.eigenvectors;

  KrausSet ks;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double b = basis.eigenvalues(j);
      if (b <= 1e-15) continue;
      CMatrix k(2, 2);
      for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp) {
          const auto block = v.block(s * d, sp * d, d, d);
          k(s, sp) = std::sqrt(b) * w.col(i).dot(block * w.col(j));  // dot() conjugates its left operand
        }
      ks.operators.push_back(std::move(k));
      ks.labels.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return ks;
}

inline const KrausSet& DQC1Channel::kraus() const {
  std::call_once(kraus_->once, [this] { kraus_->set = kraus_from_dilation(dilation_, env_); });
  return kraus_->set;
}

inline CMatrix apply(const DQC1Channel& ch, const CMatrix& rho) {
  detail::require_density(rho, 2, "apply");
  return ch.apply(rho);
}

/// Direct Stinespring route through the full register state and an explicit
/// partial trace. Slow; kept as an independent path for cross-checks.
inline CMatrix apply_stinespring(const DQC1Channel& ch, const CMatrix& rho) {
  detail::require(rho.rows() == 2 && rho.cols() == 2, "apply_stinespring: expected a 2x2 operator");
  const CMatrix& v = ch.dilation_unitary();
  const CMatrix global = v * linalg::tensor(rho, ch.env_state()) * v.adjoint();
  return linalg::partial_trace(global, 2, ch.env_state().rows(), true);
}

/// Time-reversed channel tr_n{V^dagger (rho (x) env) V}. Involutive.
inline DQC1Channel reverse(const DQC1Channel& ch) {
  const Direction flipped = ch.direction() == Direction::forward ? Direction::reverse : Direction::forward;
  return DQC1Channel(ch.dilation_unitary().adjoint(), ch.n(), flipped, ch.env_state());
}

/// Unnormalised Choi matrix (E (x) id)|phi><phi| with |phi> = |00> + |11>:
/// entry [2k + i, 2l + j] = E(|i><j|)[k, l]. Trace 2.
struct ChoiMatrix {
  CMatrix matrix;

  [[nodiscard]] double hermiticity_defect() const { return linalg::hermiticity_residual(matrix); }
  [[nodiscard]] double min_eigenvalue() const { return linalg::hermitian_eig(matrix).eigenvalues.minCoeff(); }
  [[nodiscard]] int rank(double tol = 1e-10) const {
    const auto ev = linalg::hermitian_eig(matrix).eigenvalues;
    return static_cast<int>((ev.array() > tol).count());
  }
};

inline ChoiMatrix choi_numeric(const DQC1Channel& ch) {
  CMatrix y = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const CMatrix out = ch.apply(linalg::basis_op(2, i, j));
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) y(2 * k + i, 2 * l + j) = out(k, l);
    }
  return {y};
}

/// Closed-form Choi matrix of the trace-estimation channel, a function of the
/// normalised trace only (the Frobenius norm of a unitary is fixed at 2^n).
inline ChoiMatrix choi_closed_form(double re_tr, double im_tr, int n) {
  detail::require(n >= 1 && n <= 62, "choi_closed_form: n out of range");
  const double dim = std::ldexp(1.0, n);
  detail::require(re_tr * re_tr + im_tr * im_tr <= dim * dim * (1.0 + 1e-12),
                  "choi_closed_form: |tr U| exceeds 2^n");
  const double t = re_tr / dim;
  const cplx c(0.0, im_tr / (2.0 * dim));  // i Im tr U / 2^{n+1}
  const double p = 0.5 * (1.0 + t);
  const double q = 0.5 * (1.0 - t);
  CMatrix y(4, 4);
  y << p, c, c, p,
      -c, q, q, -c,
      -c, q, q, -c,
      p, c, c, p;
  return {y};
}

/// E(rho) = tr_2{(I (x) rho^T) Upsilon}
inline CMatrix choi_apply(const ChoiMatrix& choi, const CMatrix& rho) {
  detail::require(choi.matrix.rows() == 4 && choi.matrix.cols() == 4, "choi_apply: Choi matrix must be 4x4");
  detail::require(rho.rows() == 2 && rho.cols() == 2, "choi_apply: expected a 2x2 operator");
  const CMatrix lifted = linalg::tensor(linalg::identity(2), rho.transpose()) * choi.matrix;
  return linalg::partial_trace(lifted, 2, 2, true);
}

/// One Kraus operator per Choi eigenvalue above rank_tol: K[a,b] = sqrt(lambda) v[2a + b].
inline KrausSet kraus_from_choi(const ChoiMatrix& choi, double rank_tol = 1e-10) {
  detail::require(choi.matrix.rows() == 4 && choi.matrix.cols() == 4, "kraus_from_choi: Choi matrix must be 4x4");
  const auto eig = linalg::hermitian_eig(choi.matrix);
  detail::require(eig.eigenvalues.minCoeff() >= -1e-10, "kraus_from_choi: Choi matrix is not positive semidefinite");
  KrausSet ks;
  for (Eigen::Index k = 3; k >= 0; --k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda <= rank_tol) continue;
    CMatrix op(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) op(a, b) = std::sqrt(lambda) * eig.eigenvectors(2 * a + b, k);
    ks.operators.push_back(std::move(op));
    ks.labels.emplace_back(static_cast<int>(3 - k), 0);
  }
  return ks;
}

}  // namespace dqc1
