#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swipt::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;  // gradcheck mismatch
inline constexpr int kConfigError = 2;
inline constexpr int kFormatError = 3;
inline constexpr int kTrainingError = 4;

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swipt::cli
