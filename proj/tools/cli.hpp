#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcgs::cli {

/// Exit codes: 0 success, 1 argument or input error, 2 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Output directory override; relative output paths resolve against it.
inline constexpr const char* kOutputDirEnv = "PCGS_OUTPUT_DIR";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace pcgs::cli
