// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace semx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool on `args` (args[0] is the program name). JSON results go to
/// `out` unless redirected with --out; logs go to stderr.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace semx::cli
