// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "pseudoref/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pseudoref::cli::run_cli(args, std::cout, std::cerr, pseudoref::config::process_env());
}
