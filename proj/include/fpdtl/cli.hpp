#pragma once

#include <iosfwd>

namespace fpdtl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kVersion = "0.1.0";

/// Parses argv, runs the chosen subcommand and returns the process exit code.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpdtl::cli
