// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <span>
#include <string>

#include "pseudoref/config.hpp"

namespace pseudoref::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitBackend = 3;

/// `args` excludes the program name. Machine output goes to `out`,
/// diagnostics to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err,
            const config::EnvLookup& env);

}  // namespace pseudoref::cli
