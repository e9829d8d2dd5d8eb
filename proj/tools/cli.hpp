#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cltlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitSuiteFailed = 2;

// Runs one command line. Reports go to --output when given, otherwise to
// `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience for in-process callers; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cltlab::cli
