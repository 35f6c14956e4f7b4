#pragma once

// The slipform command line, callable in-process. Exit codes: 0 ok,
// 1 verification failure, 2 parse or usage error, 3 infeasible construction.

#include <ostream>
#include <string>
#include <vector>

namespace slipform::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kInfeasible = 3 };

/// `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Parses "lo:hi:n" (log spaced) or "lo:hi:n:lin"; throws Errc::ParseError.
std::vector<double> parse_grid(const std::string &spec);

}  // namespace slipform::cli
