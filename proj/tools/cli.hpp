#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bitp::cli {

// Exit codes.
inline constexpr int ok = 0;
inline constexpr int data_error = 1;
inline constexpr int usage_error = 2;

/// Run one command line. `args` excludes the program name. Results go to
/// files or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bitp::cli
