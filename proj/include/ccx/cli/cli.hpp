#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace ccx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFindings = 2;
inline constexpr int kExitUsage = 64;

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`. With `interactive`, the REPL prints a prompt.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        bool interactive = false);

}  // namespace ccx::cli
