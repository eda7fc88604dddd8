// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dqc1/linalg.hpp"
#include "json.hpp"

// Matrix JSON: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.
namespace dqc1 {

using nlohmann::json;
using linalg::CMatrix;

inline json matrix_to_json(const CMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real() + 0.0, m(i, j).imag() + 0.0});  // no negative zeros
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("data"),
                  "matrix json: expected object with rows, cols, data");
  detail::require(j["rows"].is_number_integer() && j["cols"].is_number_integer(),
                  "matrix json: rows/cols must be integers");
  const auto rows = j["rows"].get<long long>();
  const auto cols = j["cols"].get<long long>();
  detail::require(rows >= 1 && cols >= 1, "matrix json: rows and cols must be positive");
  const json& data = j["data"];
  detail::require(data.is_array() && static_cast<long long>(data.size()) == rows * cols,
                  "matrix json: data length must equal rows*cols");
  CMatrix m(rows, cols);
  for (long long k = 0; k < rows * cols; ++k) {
    const json& e = data[static_cast<std::size_t>(k)];
    detail::require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                    "matrix json: entry " + std::to_string(k) + " must be [re, im]");
    m(k / cols, k % cols) = linalg::cplx(e[0].get<double>(), e[1].get<double>());
  }
  detail::require(linalg::all_finite(m), "matrix json: entries must be finite");
  return m;
}

inline CMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot open matrix file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("matrix file " + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

}  // namespace dqc1
