#ifndef ADDIVORTES_CLI_HPP
#define ADDIVORTES_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace addivortes {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitBenchmarkFailure = 1,  // at least one benchmark dataset failed
  kExitInput = 2,             // unreadable or malformed input, bad flags or configuration
  kExitNumeric = 3,           // numeric failure while sampling or scoring
};

// Dispatches `args` (without the program name), e.g. {"train", "--data", "x.csv", ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace addivortes

#endif
