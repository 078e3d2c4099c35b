#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plumeig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitRuntimeFailure = 3;

/// Entry point for `plumeig <subcommand> ...`; `args` excludes the program
/// name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plumeig::cli
