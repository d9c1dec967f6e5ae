// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Exit codes: 0 success (warnings allowed), 2 bad
// configuration, 3 numerical failure or a failed hard check.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rshe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rshe
