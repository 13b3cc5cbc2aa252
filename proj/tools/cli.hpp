#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace flagmirror::cli {

enum ExitCode { kSuccess = 0, kCheckFailed = 1, kUsage = 2 };

// Runs one subcommand; output goes to out, diagnostics to err. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1,0.5-2i,3i": real or complex literals separated by commas. Throws std::invalid_argument.
std::vector<std::complex<double>> parse_q(const std::string& s);

}  // namespace flagmirror::cli
