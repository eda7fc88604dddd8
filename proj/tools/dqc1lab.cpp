// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "dqc1/cli_args.hpp"

int main(int argc, char** argv) {
  const auto parsed = dqc1::cli::parse_args(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return dqc1::cli::run(*parsed.config, std::cout, std::cerr);
}
