#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seqtrace {

// Exit status: 0 success, 1 usage or validation error, 2 analysis failure.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitAnalysis = 2 };

// Batch front end: trace, report, analyze {spot|mtf|psf|opd|field|seidel}, image,
// optimize {local|hammer}. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqtrace
