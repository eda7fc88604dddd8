// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqc1/matrix_json.hpp"
#include "dqc1/register.hpp"

namespace dqc1 {

/// Two-qubit parameterised iSWAP; Re tr / 4 = cos^2(theta/4).
inline CMatrix iswap(double theta) {
  CMatrix u = CMatrix::Zero(4, 4);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  u(0, 0) = 1.0;
  u(1, 1) = c;
  u(1, 2) = linalg::kI * s;
  u(2, 1) = linalg::kI * s;
  u(2, 2) = c;
  u(3, 3) = 1.0;
  return u;
}

/// Normalised real trace of iswap(theta), cos^2(theta/4).
inline double iswap_normalized_trace(double theta) {
  const double c = std::cos(theta / 4.0);
  return c * c;
}

/// Haar unitary on 2^n conjugated to a spectrum of conjugate pairs, so its trace is real.
inline CMatrix real_trace_unitary(int n, std::uint64_t seed) {
  detail::require(n >= 1, "real_trace_unitary: n must be >= 1");
  const Eigen::Index d = Eigen::Index{1} << n;
  const CMatrix w = linalg::haar_unitary(d, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXcd spectrum(d);
  for (Eigen::Index k = 0; k < d; k += 2) {
    const double phi = phase(rng);
    spectrum(k) = std::polar(1.0, phi);
    spectrum(k + 1) = std::polar(1.0, -phi);
  }
  return w * spectrum.asDiagonal() * w.adjoint();
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Parses "0.5", "-1e-3", "pi", "2pi", "-pi/2", "3pi/4", "0.5/3".
inline double parse_scalar(std::string_view text) {
  std::string s(text);
  detail::require(!s.empty(), "empty numeric value");
  double denom = 1.0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    denom = parse_scalar(std::string_view(s).substr(slash + 1));
    detail::require(denom != 0.0, "division by zero in '" + std::string(text) + "'");
    s = s.substr(0, slash);
  }
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s = s.substr(0, s.size() - 2);
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  detail::require(ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(value),
                  "cannot parse number '" + std::string(text) + "'");
  return value * factor / denom;
}

inline long long parse_integer(std::string_view text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  detail::require(ec == std::errc() && ptr == text.data() + text.size(),
                  "cannot parse integer '" + std::string(text) + "'");
  return value;
}

/// A resolved target unitary plus the family parameter it came from, if any.
struct UnitarySource {
  CMatrix u;
  std::string label;
  std::optional<double> theta;  // set for the iswap family
};

/// Resolves "iswap:<theta>", "identity:<n>", "haar:<n>:<seed>", or a Matrix JSON file path.
inline UnitarySource resolve_unitary(const std::string& source) {
  const auto parts = split(source, ':');
  const std::string& kind = parts.front();
  if (kind == "iswap") {
    detail::require(parts.size() == 2, "iswap family expects 'iswap:<theta>'");
    const double theta = parse_scalar(parts[1]);
    return {iswap(theta), source, theta};
  }
  if (kind == "identity") {
    detail::require(parts.size() == 2, "identity family expects 'identity:<n>'");
    const long long n = parse_integer(parts[1]);
    detail::require(n >= 1, "identity family: n must be >= 1");
    if (n > kMaxAncillas) throw DimensionCap("identity family: n exceeds cap " + std::to_string(kMaxAncillas));
    return {linalg::identity(Eigen::Index{1} << n), source, std::nullopt};
  }
  if (kind == "haar") {
    detail::require(parts.size() == 3, "haar family expects 'haar:<n>:<seed>'");
    const long long n = parse_integer(parts[1]);
    detail::require(n >= 1, "haar family: n must be >= 1");
    if (n > kMaxAncillas) throw DimensionCap("haar family: n exceeds cap " + std::to_string(kMaxAncillas));
    const auto seed = static_cast<std::uint64_t>(parse_integer(parts[2]));
    return {linalg::haar_unitary(Eigen::Index{1} << n, seed), source, std::nullopt};
  }
  CMatrix u = load_matrix_file(source);
  const int n = ancilla_count(u);
  if (n > kMaxAncillas) throw DimensionCap("matrix file: n exceeds cap " + std::to_string(kMaxAncillas));
  detail::require(linalg::is_unitary(u), "matrix file " + source + " is not unitary");
  return {std::move(u), source, std::nullopt};
}

}  // namespace dqc1
