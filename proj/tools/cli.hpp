#ifndef DDC_TOOLS_CLI_HPP
#define DDC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ddc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `ddc` tool. `args` excludes the program name.
int cliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddc::cli

#endif  // DDC_TOOLS_CLI_HPP
