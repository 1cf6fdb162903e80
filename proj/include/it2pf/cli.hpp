#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace it2pf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Failures print
/// "error[<category>]: <message>" to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace it2pf
