// Copyright 2026 The randstep Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "randstep/error.hpp"
#include "randstep/harness.hpp"

namespace randstep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

class UsageError : public Error {
  public:
    using Error::Error;
};

/// Runs the command line `args` (args[0] is the program name).
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

/// "lo:hi" inclusive, or a single integer.
RateWindow parse_range(std::string const& text);
/// Comma separated scheme identifiers.
std::vector<StepScheme> parse_scheme_list(std::string const& text);

/// Log2-log2 chart: one polyline per scheme plus dashed slope-0.5 and slope-1
/// guides. Requires a nonempty table with positive, finite errors.
std::string render_svg_loglog(ErrorTable const& table, ErrorMode mode = ErrorMode::FinalTime);
void emit_svg_loglog(ErrorTable const& table, std::string const& path,
                     ErrorMode mode = ErrorMode::FinalTime);

}  // namespace randstep::cli
