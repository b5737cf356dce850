#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lambdarep {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitAcceptance = 4;

/// Runs one command line (without the program name) and returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lambdarep
