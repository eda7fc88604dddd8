// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dqc1/channel.hpp"
#include "dqc1/energetics.hpp"
#include "dqc1/entropy.hpp"
#include "dqc1/families.hpp"
#include "dqc1/register.hpp"
#include "dqc1/thermo.hpp"
#include "test_support.hpp"

namespace {

using dqc1::DQC1Channel;
using dqc1::RegisterSpec;
using dqc1::linalg::CMatrix;
using dqc1::linalg::cplx;
namespace la = dqc1::linalg;
namespace dt = dqc1::testing;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Tracks a worst-case value against a bound.
struct Worst {
  double value = 0.0;
  void add(double v) { value = std::max(value, std::isnan(v) ? dqc1::kInfinity : v); }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<double> theta_grid(int count) {
  std::vector<double> g;
  for (int k = 0; k < count; ++k) g.push_back(2.0 * kPi * k / (count - 1));
  return g;
}

Eigen::Index dim_of(int n) { return Eigen::Index{1} << n; }

Outcome unitality_theorem() {
  Worst defect;
  int count = 0;
  for (int n = 1; n <= 5; ++n)
    for (std::uint64_t s = 0; s < 40; ++s, ++count) {
      const CMatrix v = la::haar_unitary(2 * dim_of(n), 10007 * n + s);
      defect.add(dqc1::unitality_defect(dqc1::kraus_from_dilation(v, dqc1::maximally_mixed(dim_of(n)))));
    }
  return {count == 200 && defect.value <= 1e-10,
          std::to_string(count) + " dilations, max defect " + sci(defect.value) + " (tol 1e-10)"};
}

Outcome appendix_a_cases() {
  Worst separable, controlled;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(s % 3);
    const Eigen::Index d = dim_of(n);
    const CMatrix env = dt::random_density(d, 70000 + s);
    const CMatrix vs = la::tensor(la::haar_unitary(2, 71000 + s), la::haar_unitary(d, 72000 + s));
    separable.add(dqc1::unitality_defect(dqc1::kraus_from_dilation(vs, env)));
    CMatrix vc = CMatrix::Zero(2 * d, 2 * d);
    vc.topLeftCorner(d, d) = la::haar_unitary(d, 73000 + s);
    vc.bottomRightCorner(d, d) = la::haar_unitary(d, 74000 + s);
    controlled.add(dqc1::unitality_defect(dqc1::kraus_from_dilation(vc, env)));
  }
  double largest = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int n = 1 + static_cast<int>(s % 3);
    const CMatrix env = dt::product_diagonal_state(n, 0.9);
    largest = std::max(largest, dqc1::unitality_defect(
                                    dqc1::kraus_from_dilation(la::haar_unitary(2 * dim_of(n), 75000 + s), env)));
  }
  const bool ok = separable.value <= 1e-10 && controlled.value <= 1e-10 && largest > 1e-3;
  return {ok, "separable " + sci(separable.value) + ", controlled " + sci(controlled.value) +
                  " (tol 1e-10); generic scan max " + sci(largest) + " (need > 1e-3)"};
}

Outcome kraus_choi_cross_validation() {
  Worst closed_gap, third_eig, recon, frob;
  bool rank_two = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(s % 3);
    const CMatrix u = la::haar_unitary(dim_of(n), 80000 + s);
    const auto ch = DQC1Channel::trace_estimation(u);
    const auto numeric = dqc1::choi_numeric(ch);
    const cplx tr = u.trace();
    const auto closed = dqc1::choi_closed_form(tr.real(), tr.imag(), n);
    closed_gap.add((numeric.matrix - closed.matrix).cwiseAbs().maxCoeff());
    const auto ev = la::hermitian_eig(numeric.matrix).eigenvalues;  // ascending
    third_eig.add(std::abs(ev(1)));
    rank_two &= numeric.rank() == 2;
    const auto ks = dqc1::kraus_from_choi(numeric);
    rank_two &= ks.size() == 2;
    for (std::uint64_t r = 0; r < 3; ++r) {
      const CMatrix rho = dt::random_density(2, 81000 + 10 * s + r);
      recon.add((dqc1::kraus_apply(ks, rho) - ch.apply(rho)).norm());
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      for (Eigen::Index j = 0; j < u.cols(); ++j) sum += std::norm(u(i, j));
    frob.add(std::abs(sum - static_cast<double>(dim_of(n))));
  }
  const bool ok = closed_gap.value <= 1e-11 && third_eig.value < 1e-10 && rank_two && recon.value <= 1e-10 &&
                  frob.value <= 1e-10;
  return {ok, "closed-form gap " + sci(closed_gap.value) + ", third eigenvalue " + sci(third_eig.value) +
                  ", rank 2 " + (rank_two ? "yes" : "no") + ", reconstruction " + sci(recon.value) +
                  ", Frobenius " + sci(frob.value)};
}

Outcome mean_work_paths() {
  Worst gap;
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (double theta : theta_grid(64)) {
      const CMatrix u = dqc1::iswap(theta);
      const double t = dqc1::normalized_trace(u).real();
      const auto ch = DQC1Channel::trace_estimation(u);
      const double formula = dqc1::mean_work(alpha, 1.0, t);
      const CMatrix before = dqc1::logical_state(alpha);
      const CMatrix after = ch.apply(before);
      const double from_states = -((after(0, 0) - after(1, 1)) - (before(0, 0) - before(1, 1))).real();
      const double from_distribution = dqc1::moment(dqc1::work_distribution(alpha, 1.0, ch), 1);
      gap.add(std::abs(formula - from_states));
      gap.add(std::abs(formula - from_distribution));
      gap.add(std::abs(from_states - from_distribution));
    }
  return {gap.value <= 1e-12, "5 x 64 grid, max disagreement " + sci(gap.value) + " (tol 1e-12)"};
}

Outcome trace_estimation_reductions() {
  Worst state_gap, mu_gap;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(s % 4);
    const CMatrix u = dqc1::real_trace_unitary(n, 90000 + s);
    const double t = dqc1::normalized_trace(u).real();
    const double alpha = 0.02 * static_cast<double>(s);
    const CMatrix out = DQC1Channel::trace_estimation(u).apply(dqc1::logical_state(alpha));
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = 0.5 * (1.0 + alpha * t);
    expected(1, 1) = 0.5 * (1.0 - alpha * t);
    state_gap.add((out - expected).cwiseAbs().maxCoeff());
    mu_gap.add(std::abs(dqc1::mu_of(dqc1::trace_estimation_unitary(u), n) - t));
  }
  return {state_gap.value <= 1e-12 && mu_gap.value <= 1e-12,
          "50 real-trace U, state gap " + sci(state_gap.value) + ", mu gap " + sci(mu_gap.value) + " (tol 1e-12)"};
}

Outcome crooks_relation() {
  Worst dev;
  int skipped = 0, cells = 0;
  for (int a = 1; a <= 9; ++a)
    for (double theta : theta_grid(64)) {
      const auto r = dqc1::crooks_check(0.1 * a, 1.0, DQC1Channel::trace_estimation(dqc1::iswap(theta)));
      skipped += r.status != dqc1::CrooksStatus::ok;
      dev.add(r.max_ratio_deviation);
      ++cells;
    }
  return {skipped == 0 && dev.value <= 1e-10,
          std::to_string(cells) + " cells, max deviation " + sci(dev.value) + " (tol 1e-10)"};
}

/// Logical-qubit energy change from the gate-level circuit on the full register.
double brute_delta_energy(const CMatrix& u, double alpha, double omega) {
  const Eigen::Index d = u.rows();
  CMatrix rho_c = CMatrix::Zero(2, 2);
  rho_c(0, 0) = 0.5 * (1 + alpha);
  rho_c(1, 1) = 0.5 * (1 - alpha);
  const CMatrix v = dt::circuit_oracle(u);
  const CMatrix global = v * dt::kron_oracle(rho_c, CMatrix::Identity(d, d) / static_cast<double>(d)) * v.adjoint();
  const CMatrix c2 = dt::trace_out_env_oracle(global, d);
  return -omega * ((c2(0, 0) - c2(1, 1)) - (rho_c(0, 0) - rho_c(1, 1))).real();
}

Outcome energetics_ledger() {
  Worst heat, mi, first_law, landauer, brute;
  int instances = 0;
  for (int n = 1; n <= 3; ++n)
    for (double alpha : {0.0, 0.2, 0.5, 0.8, 1.0})
      for (std::uint64_t s = 0; s < 4; ++s, ++instances) {
        std::vector<double> freqs;
        for (int i = 0; i < n; ++i) freqs.push_back(0.7 + 0.3 * i + 0.1 * static_cast<double>(s));
        const auto spec = RegisterSpec::make(n, alpha, 1.0, freqs);
        const CMatrix u = la::haar_unitary(dim_of(n), 95000 + 100 * n + s);
        const auto r = dqc1::energetics_report(spec, u);
        heat.add(std::abs(r.heat_to_ancilla));
        mi.add(std::abs(r.mutual_info - r.delta_S_C));
        first_law.add(std::abs(r.delta_E_C - r.mean_work_C));
        if (r.sigma_A && std::isfinite(r.rel_entropy_logical)) landauer.add(std::abs(r.sigma_A_landauer - *r.sigma_A));
        brute.add(std::abs(r.delta_E_C - brute_delta_energy(u, alpha, 1.0)));
      }
  const bool ok = heat.value <= 1e-10 && mi.value <= 1e-10 && first_law.value <= 1e-12 && landauer.value <= 1e-9 &&
                  brute.value <= 1e-12;
  return {ok, std::to_string(instances) + " instances: heat " + sci(heat.value) + ", I - dS " + sci(mi.value) +
                  ", dE - <W> " + sci(first_law.value) + ", Landauer routes " + sci(landauer.value) +
                  ", brute dE " + sci(brute.value)};
}

Outcome entropy_surface() {
  double most_negative = 0.0;
  Worst t_one, alpha_zero;
  for (int a = 0; a <= 50; ++a)
    for (int k = 0; k <= 100; ++k) {
      const double alpha = a / 50.0, t = -1.0 + k / 50.0;
      const double ds = dqc1::delta_entropy_logical(alpha, t);
      most_negative = std::min(most_negative, ds);
      if (k == 100) t_one.add(std::abs(ds));
      if (a == 0) alpha_zero.add(std::abs(ds));
    }
  const double spot = std::abs(dqc1::delta_entropy_logical(1.0, 0.0) - std::log(2.0));
  const bool ok = most_negative >= -1e-12 && t_one.value <= 1e-12 && alpha_zero.value <= 1e-12 && spot <= 1e-12;
  return {ok, "51 x 101 grid, min " + sci(most_negative) + ", t=1 line " + sci(t_one.value) + ", alpha=0 line " +
                  sci(alpha_zero.value) + ", ln2 spot " + sci(spot)};
}

Outcome work_distribution_shapes() {
  const auto half = DQC1Channel::trace_estimation(dqc1::iswap(kPi));  // t = 1/2
  const auto clean = dqc1::work_distribution(1.0, 1.0, half);
  const bool exact = clean.points.size() == 2 && clean.probability_at(2.0) == 0.25 && clean.probability_at(0.0) == 0.75;
  Worst asym;
  bool decreasing = true;
  for (double theta : theta_grid(64)) {
    const auto ch = DQC1Channel::trace_estimation(dqc1::iswap(theta));
    const auto mixed = dqc1::work_distribution(0.0, 1.0, ch);
    for (const auto& p : mixed.points) asym.add(std::abs(p.probability - mixed.probability_at(-p.work)));
    const double t = dqc1::iswap_normalized_trace(theta);
    if (t < 1.0 - 1e-12) {
      const double v0 = dqc1::variance(dqc1::work_distribution(0.0, 1.0, ch));
      const double v5 = dqc1::variance(dqc1::work_distribution(0.5, 1.0, ch));
      const double v1 = dqc1::variance(dqc1::work_distribution(1.0, 1.0, ch));
      decreasing &= v0 > v5 && v5 > v1;
    }
  }
  return {exact && asym.value <= 1e-14 && decreasing,
          std::string("alpha=1 t=1/2 exact ") + (exact ? "yes" : "no") + ", alpha=0 asymmetry " + sci(asym.value) +
              ", variance strictly decreasing " + (decreasing ? "yes" : "no")};
}

Outcome monte_carlo_estimator() {
  const CMatrix u = dqc1::iswap(kPi);
  int covered_full = 0, covered_half = 0;
  double se_full = 0.0, se_half = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto full = dqc1::sample_trace(RegisterSpec::make(2, 1.0), u, dqc1::Basis::Z, 100000, 123000 + s);
    const auto half = dqc1::sample_trace(RegisterSpec::make(2, 0.5), u, dqc1::Basis::Z, 100000, 124000 + s);
    covered_full += std::abs(full.estimate - 2.0) <= 3.0 * full.std_error;
    covered_half += std::abs(half.estimate - 2.0) <= 3.0 * half.std_error;
    se_full += full.std_error;
    se_half += half.std_error;
  }
  const double ratio = se_half / se_full;
  const bool ok = covered_full >= 18 && covered_half >= 18 && std::abs(ratio - 2.0) <= 0.15 * 2.0;
  return {ok, "3-sigma coverage " + std::to_string(covered_full) + "/20 (alpha=1), " + std::to_string(covered_half) +
                  "/20 (alpha=0.5); std_error ratio " + sci(ratio) + " (target 2 +- 15%)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  std::optional<double> budget_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"unitality_theorem", unitality_theorem, 60.0},
      {"appendix_a_case_suite", appendix_a_cases, 30.0},
      {"kraus_choi_cross_validation", kraus_choi_cross_validation, std::nullopt},
      {"mean_work_three_paths", mean_work_paths, std::nullopt},
      {"trace_estimation_reductions", trace_estimation_reductions, std::nullopt},
      {"crooks_relation", crooks_relation, std::nullopt},
      {"energetics_ledger", energetics_ledger, 20.0},
      {"entropy_surface", entropy_surface, std::nullopt},
      {"work_distribution_shapes", work_distribution_shapes, std::nullopt},
      {"monte_carlo_estimator", monte_carlo_estimator, std::nullopt},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = sci(secs) + " s";
    if (c.budget_seconds) {
      timing += " of " + sci(*c.budget_seconds) + " s budget";
      pass &= secs <= *c.budget_seconds;
    }
    std::printf("%s %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing.c_str());
    failed += !pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
