#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace miss::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `miss` invocation. `args` excludes the program name. Results go
/// to `out`, diagnostics and progress to `err`; the return value is the exit
/// code. Never throws.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace miss::cli
