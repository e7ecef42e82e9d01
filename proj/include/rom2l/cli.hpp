// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rom2l/bench.hpp"

namespace rom2l::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;

// "r:R" -> (r, R, R). Throws UsageError on malformed input or r >= R.
bench::Triple parse_pair(const std::string &s);
// "r:R1:R2". Throws UsageError on malformed input or r >= R2.
bench::Triple parse_triple(const std::string &s);

/// Subcommands: offline, exp1, exp2, validate. Returns 0 on success, 1 when
/// solver failures or failed checks are present, 2 on usage errors.
int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int cli_main(int argc, char **argv);

}  // namespace rom2l::cli
