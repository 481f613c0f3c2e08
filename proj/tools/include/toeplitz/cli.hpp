#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toeplitz::cli {

// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kVerificationFailed = 2;

// args excludes the program name. Output goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace toeplitz::cli
