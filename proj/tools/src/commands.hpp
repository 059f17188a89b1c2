#pragma once

#include <ostream>

namespace mechpf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

/// Runs one command line. Data goes to `out` only with --stdout;
/// diagnostics always go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mechpf::cli
