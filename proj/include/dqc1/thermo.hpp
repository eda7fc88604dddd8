// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dqc1/channel.hpp"
#include "dqc1/entropy.hpp"
#include "dqc1/register.hpp"

/// Thermodynamics of the logical qubit under H_C = -omega sigma^z.
namespace dqc1 {

/// Effective-temperature bookkeeping for a polarised logical qubit whose
/// final polarisation is alpha * t.
///
/// beta omega = arctanh(alpha) and beta omega' = arctanh(alpha t). At
/// alpha = 1 the qubit is pure, beta is infinite and both beta and
/// omega_prime are left empty.
struct ThermalFrame {
  double alpha = 0.0;
  double omega = 1.0;
  double t = 1.0;
  std::optional<double> beta;
  std::optional<double> omega_prime;

  [[nodiscard]] bool infinite_beta() const { return !beta.has_value(); }
};

inline ThermalFrame thermal_frame(double alpha, double omega, double t) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "thermal_frame: alpha must lie in [0, 1]");
  detail::require(omega > 0.0 && std::isfinite(omega), "thermal_frame: omega must be positive");
  detail::require(std::abs(t) <= 1.0, "thermal_frame: |t| must be <= 1");
  ThermalFrame f{alpha, omega, t, std::nullopt, std::nullopt};
  if (alpha >= 1.0) return f;
  if (alpha == 0.0) {
    f.beta = 0.0;
    f.omega_prime = omega * t;  // arctanh(a t)/arctanh(a) -> t as a -> 0
    return f;
  }
  const double a = std::atanh(alpha);
  f.beta = a / omega;
  f.omega_prime = omega * std::atanh(alpha * t) / a;
  return f;
}

/// <W_C> = tr{H_C (rho'_C - rho_C)} = alpha omega (1 - t)
inline double mean_work(double alpha, double omega, double t) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "mean_work: alpha must lie in [0, 1]");
  detail::require(std::abs(t) <= 1.0, "mean_work: |t| must be <= 1");
  return alpha * omega * (1.0 - t);
}

struct WorkPoint {
  double work = 0.0;
  double probability = 0.0;
};

/// Finite discrete work distribution, support sorted ascending.
struct WorkDistribution {
  std::vector<WorkPoint> points;
  double hamiltonian_gap = 2.0;

  [[nodiscard]] double probability_at(double w, double tol = 1e-12) const {
    for (const auto& p : points)
      if (std::abs(p.work - w) <= tol) return p.probability;
    return 0.0;
  }

  [[nodiscard]] double total_probability() const {
    double s = 0.0;
    for (const auto& p : points) s += p.probability;
    return s;
  }
};

inline constexpr double kProbabilityFloor = 1e-15;
inline constexpr double kWorkMergeTol = 1e-12;

/// Energies of H_C = -omega sigma^z: |0> at -omega, |1> at +omega.
inline std::array<double, 2> logical_energies(double omega) { return {-omega, omega}; }

/// Two-point-measurement work statistics of the logical qubit, starting from
/// rho_C(alpha) and measuring H_C before and after the channel:
/// P(W) = sum_{n,m} p_n <m|E(|n><n|)|m> delta(W - (E_m - E_n)).
///
/// Points at most 1e-12 apart are merged; points with probability at most
/// 1e-15 are dropped.
inline WorkDistribution work_distribution(double alpha, double omega, const DQC1Channel& ch) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "work_distribution: alpha must lie in [0, 1]");
  detail::require(omega > 0.0, "work_distribution: omega must be positive");
  const auto energy = logical_energies(omega);
  const CMatrix rho = logical_state(alpha);
  std::vector<WorkPoint> raw;
  for (int n = 0; n < 2; ++n) {
    const double pn = rho(n, n).real();
    const CMatrix out = ch.apply(linalg::basis_op(2, n, n));
    for (int m = 0; m < 2; ++m) raw.push_back({energy[m] - energy[n], pn * out(m, m).real()});
  }
  std::sort(raw.begin(), raw.end(), [](const WorkPoint& a, const WorkPoint& b) { return a.work < b.work; });
  WorkDistribution wd;
  wd.hamiltonian_gap = 2.0 * omega;
  for (const auto& p : raw) {
    if (!wd.points.empty() && std::abs(wd.points.back().work - p.work) <= kWorkMergeTol)
      wd.points.back().probability += p.probability;
    else
      wd.points.push_back(p);
  }
  std::erase_if(wd.points, [](const WorkPoint& p) { return p.probability <= kProbabilityFloor; });
  return wd;
}

/// sum_i p_i w_i^k
inline double moment(const WorkDistribution& wd, int k) {
  detail::require(k >= 1, "moment: k must be >= 1");
  double s = 0.0;
  for (const auto& p : wd.points) s += p.probability * std::pow(p.work, k);
  return s;
}

inline double variance(const WorkDistribution& wd) {
  const double m1 = moment(wd, 1);
  return moment(wd, 2) - m1 * m1;
}

enum class CrooksStatus { ok, skipped_degenerate_beta };

inline const char* crooks_status_name(CrooksStatus s) {
  return s == CrooksStatus::ok ? "ok" : "skipped_degenerate_beta";
}

struct CrooksPoint {
  double work = 0.0;
  double p_forward = 0.0;       // P_F(W)
  double p_reverse = 0.0;       // P_R(-W)
  double ratio = 0.0;           // P_F(W) / P_R(-W)
  double expected = 0.0;        // exp(beta W)
  double deviation = 0.0;
  double free_energy_form = 0.0;  // exp(beta (W - Delta F)), reported only
};

struct CrooksReport {
  CrooksStatus status = CrooksStatus::ok;
  double alpha = 0.0;
  double omega = 1.0;
  std::optional<double> beta;
  std::vector<CrooksPoint> support;
  double max_ratio_deviation = 0.0;

  // Reported for comparison, never asserted.
  double final_polarization = 0.0;
  std::optional<double> omega_prime;
  std::optional<double> delta_free_energy;
  double delta_S_C = 0.0;
  double exp_delta_S_C = 1.0;
  double mean_entropy_production = 0.0;  // sum_W P_F ln(P_F(W)/P_R(-W))
  bool final_state_diagonal = true;

  WorkDistribution forward;
  WorkDistribution reverse;
};

/// Detailed fluctuation relation P_F(W)/P_R(-W) = exp(beta W) for the
/// logical qubit at fixed H_C, the reverse process being reverse(ch) started
/// from the same thermal state.
inline CrooksReport crooks_check(double alpha, double omega, const DQC1Channel& ch) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "crooks_check: alpha must lie in [0, 1]");
  detail::require(omega > 0.0, "crooks_check: omega must be positive");
  CrooksReport rep;
  rep.alpha = alpha;
  rep.omega = omega;
  rep.forward = work_distribution(alpha, omega, ch);
  rep.reverse = work_distribution(alpha, omega, reverse(ch));

  const CMatrix rho = logical_state(alpha);
  const CMatrix out = ch.apply(rho);
  rep.final_polarization = std::clamp((out(0, 0) - out(1, 1)).real(), -1.0, 1.0);
  rep.final_state_diagonal = std::abs(out(0, 1)) <= 1e-10;
  rep.delta_S_C = binary_entropy(0.5 * (1.0 - rep.final_polarization)) - binary_entropy(0.5 * (1.0 - alpha));
  rep.exp_delta_S_C = std::exp(rep.delta_S_C);

  if (alpha <= 0.0 || alpha >= 1.0) {
    rep.status = CrooksStatus::skipped_degenerate_beta;
    if (alpha <= 0.0) rep.beta = 0.0;
    return rep;
  }

  const double beta = std::atanh(alpha) / omega;
  rep.beta = beta;
  const double omega_prime = std::atanh(rep.final_polarization) / beta;
  rep.omega_prime = omega_prime;
  const double dF = -std::log(std::cosh(beta * omega_prime) / std::cosh(beta * omega)) / beta;
  rep.delta_free_energy = dF;

  for (const auto& p : rep.forward.points) {
    const double pr = rep.reverse.probability_at(-p.work);
    if (p.probability <= kProbabilityFloor || pr <= kProbabilityFloor) continue;
    CrooksPoint c;
    c.work = p.work;
    c.p_forward = p.probability;
    c.p_reverse = pr;
    c.ratio = p.probability / pr;
    c.expected = std::exp(beta * p.work);
    c.deviation = std::abs(c.ratio - c.expected);
    c.free_energy_form = std::exp(beta * (p.work - dF));
    rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, c.deviation);
    rep.mean_entropy_production += p.probability * std::log(c.ratio);
    rep.support.push_back(c);
  }
  return rep;
}

}  // namespace dqc1
