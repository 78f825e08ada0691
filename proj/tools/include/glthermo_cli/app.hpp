#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace glthermo::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_usage = 2;

// Runs one invocation; args excludes the program name.  The primary output
// goes to --out when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string build_id();

}  // namespace glthermo::cli
