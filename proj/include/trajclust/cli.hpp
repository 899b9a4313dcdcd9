#pragma once

#include <iosfwd>

namespace trajclust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitSystemic = 3;

/// Entry point of the `trajclust` tool: subcommands ingest, distmat,
/// refclusters and benchmark. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trajclust
