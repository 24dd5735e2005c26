#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xvine::cli {

enum Exit { kOk = 0, kBadInput = 2, kIoError = 3, kPartialFit = 4 };

/// Runs the command line `args` (without the program name); returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xvine::cli
