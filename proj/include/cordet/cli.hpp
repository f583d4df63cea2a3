#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cordet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `cordet` tool. `args` excludes the program name.
/// Returns the process exit code; nothing is written to std::cout/cerr.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a flat `key = value` config text. Blank lines and lines starting
/// with '#' or ';' are ignored. Throws std::invalid_argument on a malformed
/// line.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

}  // namespace cordet
