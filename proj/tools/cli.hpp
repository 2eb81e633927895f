#pragma once

#include <string>
#include <vector>

namespace gensol::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kBadInput = 3;
inline constexpr int kNonConverged = 4;

/// Runs the command line; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace gensol::cli
