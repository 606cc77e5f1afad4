#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pmr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `pmrtune` tool. Results go to `out` (or to files),
/// diagnostics to `err`; computation errors are reported on `err` as
/// {"error": kind, "message": text}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with args not including the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmr
