#pragma once

// Command-line front end. Every output file starts with a comment header
// holding the run configuration as JSON and a hash of the input data.

#include <iosfwd>
#include <string>
#include <vector>

namespace rankdens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// args excludes the program name. Files go to --out when given, otherwise
/// to out one after another.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankdens
