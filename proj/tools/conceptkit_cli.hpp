#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conceptkit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Runs one command line (argv[0] is the program name) and returns its exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience overload for in-process callers; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace conceptkit::cli
