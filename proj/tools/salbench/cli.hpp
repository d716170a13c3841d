#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace salbench::cli {

// Exit codes: 0 success, 1 a command or item failed (errors.json written to
// the output directory), 2 command-line usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salbench::cli
